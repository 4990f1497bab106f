"""Representative and diverse predictor subset selection.

A selection mask ``alpha`` marks which of ``M`` predictors are kept. The score
to maximize is ``representativeness + lambda_d * diversity``, where
representativeness rewards unselected predictors that are similar to some
selected one, and diversity rewards dissimilar selected pairs. Similarities are
histogram intersections of sum-normalized predictor maps averaged over frames.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .core import SaliencyMap, bilinear_resize_array
from .errors import AllZeroMap, TooManyPaths

DEFAULT_LAMBDA_D = 0.2
DEFAULT_EPSILON = 1e-8
DEFAULT_WORKING_RESOLUTION = (320, 320)
MAX_EXHAUSTIVE = 20
# objective values closer than this are treated as tied
TIE_TOL = 1e-12


@dataclass(frozen=True)
class SelectionParams:
    lambda_d: float = DEFAULT_LAMBDA_D
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if not self.lambda_d >= 0:
            raise ValueError("lambda_d must be >= 0")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    entries: np.ndarray
    names: Tuple[str, ...] = ()

    def __post_init__(self):
        s = np.array(self.entries, dtype=np.float64)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] < 1:
            raise ValueError(f"similarity matrix must be square and non-empty, got {s.shape}")
        if not np.allclose(s, s.T, atol=1e-9, rtol=0):
            raise ValueError("similarity matrix is not symmetric")
        if not np.allclose(np.diag(s), 1.0, atol=1e-9, rtol=0):
            raise ValueError("similarity matrix diagonal must be 1")
        if s.min() < -1e-9 or s.max() > 1 + 1e-9:
            raise ValueError("similarity entries must lie in [0, 1]")
        s = np.clip(s, 0.0, 1.0)
        s.setflags(write=False)
        object.__setattr__(self, "entries", s)
        names = tuple(self.names) or tuple(f"p{i + 1}" for i in range(s.shape[0]))
        if len(names) != s.shape[0]:
            raise ValueError("one name per predictor is required")
        object.__setattr__(self, "names", names)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other):
        return (isinstance(other, SimilarityMatrix) and self.names == other.names
                and np.array_equal(self.entries, other.entries))


@dataclass(frozen=True)
class SelectionMask:
    alpha: Tuple[bool, ...]

    def __post_init__(self):
        alpha = tuple(bool(a) for a in self.alpha)
        if not alpha or not any(alpha):
            raise ValueError("a selection must keep at least one predictor")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def from_indices(cls, indices, m: int) -> "SelectionMask":
        """Mask of length ``m`` from 0-based indices."""
        chosen = set(indices)
        return cls(tuple(i in chosen for i in range(m)))

    @classmethod
    def from_bits(cls, bits: int, m: int) -> "SelectionMask":
        return cls(tuple(bool((bits >> i) & 1) for i in range(m)))

    @property
    def m(self) -> int:
        return len(self.alpha)

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.alpha) if a)

    @property
    def bits(self) -> int:
        return sum(1 << i for i, a in enumerate(self.alpha) if a)

    def count(self) -> int:
        return sum(self.alpha)

    def as_array(self) -> np.ndarray:
        return np.array(self.alpha, dtype=np.float64)


def _sim_array(sim) -> np.ndarray:
    return sim.entries if isinstance(sim, SimilarityMatrix) else np.asarray(sim, dtype=np.float64)


def _check(alpha: SelectionMask, s: np.ndarray):
    if alpha.m != s.shape[0]:
        raise ValueError(f"mask has {alpha.m} entries but there are {s.shape[0]} predictors")


def similarity_matrix(maps: Mapping[str, Sequence[SaliencyMap]], target_w: int = 320,
                      target_h: int = 320) -> SimilarityMatrix:
    """Frame-averaged histogram intersection between every pair of predictors.

    ``maps`` maps predictor name to its per-frame maps (same frame count for all).
    Each map is resized to the working resolution and sum-normalized first.
    """
    names = list(maps)
    if not names:
        raise ValueError("no predictors given")
    counts = {len(maps[n]) for n in names}
    if len(counts) != 1 or 0 in counts:
        raise ValueError("every predictor needs a map for every frame (K >= 1)")
    k_frames = counts.pop()
    acc = np.zeros((len(names), len(names)))
    for k in range(k_frames):
        stack = np.empty((len(names), target_h * target_w))
        for i, n in enumerate(names):
            v = bilinear_resize_array(maps[n][k].values, target_w, target_h)
            total = v.sum()
            if not total > 0:
                raise AllZeroMap(f"predictor '{n}' produced an all-zero map on frame {k}")
            stack[i] = (v / total).ravel()
        acc += kernels.pairwise_intersection(stack)
    sim = acc / k_frames
    sim = np.minimum(np.maximum((sim + sim.T) / 2.0, 0.0), 1.0)
    np.fill_diagonal(sim, 1.0)
    return SimilarityMatrix(sim, tuple(names))


def representativeness(alpha: SelectionMask, sim, epsilon: float = DEFAULT_EPSILON) -> float:
    s = _sim_array(sim)
    _check(alpha, s)
    a = alpha.as_array()
    off = np.where(np.eye(len(a), dtype=bool), 0.0, s)
    cover = (off * a[None, :]).max(axis=1)
    return float(((1.0 - a) * cover).sum() / ((1.0 - a).sum() + epsilon))


def diversity(alpha: SelectionMask, sim, epsilon: float = DEFAULT_EPSILON) -> float:
    s = _sim_array(sim)
    _check(alpha, s)
    a = alpha.as_array()
    pair = np.outer(a, a)
    np.fill_diagonal(pair, 0.0)
    return float((pair * (1.0 - s)).sum() / (pair.sum() + epsilon))


def objective(alpha: SelectionMask, sim, params: Optional[SelectionParams] = None) -> float:
    params = params or SelectionParams()
    return (representativeness(alpha, sim, params.epsilon)
            + params.lambda_d * diversity(alpha, sim, params.epsilon))


def _tie_key(bits: int, m: int):
    # fewer predictors first, then the lexicographically smallest index list
    return (bin(bits).count("1"), tuple(i for i in range(m) if (bits >> i) & 1))


def best_mask_from_scores(scores: np.ndarray, m: int, tol: float = TIE_TOL) -> int:
    """Pick the winning mask bits from objective scores of masks ``1..2**m-1``."""
    best = scores.max()
    tied = np.flatnonzero(scores >= best - tol) + 1
    return int(min(tied, key=lambda b: _tie_key(int(b), m)))


def select_exhaustive(sim, params: Optional[SelectionParams] = None, backend: Optional[str] = None) -> SelectionMask:
    """Global maximizer over all ``2**M - 1`` non-empty masks.

    Ties (within ``TIE_TOL``) go to the mask with fewer predictors, then to the
    one whose sorted index list is lexicographically smallest.
    """
    params = params or SelectionParams()
    s = _sim_array(sim)
    m = s.shape[0]
    if m > MAX_EXHAUSTIVE:
        raise TooManyPaths(f"exhaustive selection supports at most {MAX_EXHAUSTIVE} predictors, got {m}")
    scores = kernels.enumerate_objectives(s, params.lambda_d, params.epsilon, backend=backend)
    return SelectionMask.from_bits(best_mask_from_scores(scores, m), m)


def select_greedy(sim, params: Optional[SelectionParams] = None) -> SelectionMask:
    """Add/remove local search started from the best singleton.

    Each step flips the single predictor whose flip gives the largest strict
    improvement; the search stops when no flip improves the score.
    """
    params = params or SelectionParams()
    s = _sim_array(sim)
    m = s.shape[0]

    def score(bits):
        return objective(SelectionMask.from_bits(bits, m), s, params)

    current = max(range(m), key=lambda i: (score(1 << i), -i))
    current = 1 << current
    current_score = score(current)
    while True:
        best_bits, best_score = None, current_score
        for i in range(m):
            cand = current ^ (1 << i)
            if cand == 0:
                continue
            sc = score(cand)
            if sc > best_score + TIE_TOL:
                best_bits, best_score = cand, sc
        if best_bits is None:
            return SelectionMask.from_bits(current, m)
        current, current_score = best_bits, best_score


def select(sim, params: Optional[SelectionParams] = None, solver: str = "exhaustive") -> SelectionMask:
    if solver == "exhaustive":
        return select_exhaustive(sim, params)
    if solver == "greedy":
        return select_greedy(sim, params)
    raise ValueError(f"unknown solver {solver!r}")
