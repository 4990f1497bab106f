"""Spatial ensemble fusion and adaptive spatiotemporal fusion.

The spatiotemporal step blends an entropy-weighted interaction map of the
spatial and temporal maps with whichever of the two is more compact. The blend
weight is the smaller consistency score, clamped to [0, 1], and is used only
when the interaction map is not much less compact than the better input.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import SaliencyMap, normalize_minmax, normalize_sum
from .errors import (AllZeroMap, DegenerateScores, DimensionMismatch, EmptyList,
                     ZeroEntropyDenominator)

DEFAULT_OMEGA = 2.1


@dataclass(frozen=True)
class FusionParams:
    omega: float = DEFAULT_OMEGA
    epsilon: float = 1e-8
    lambda_clamp: bool = True

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not self.lambda_clamp:
            raise ValueError("lambda clamping cannot be disabled")


@dataclass(frozen=True)
class ConsistencyScores:
    c_s2t: float
    c_t2s: float

    def __post_init__(self):
        for v in (self.c_s2t, self.c_t2s):
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"consistency scores must be finite and >= 0, got {v!r}")


class Branch(str, enum.Enum):
    BLEND = "blend"              # compactness test passed, lambda = clamped min score
    COMPACTNESS = "compactness"  # interaction map too spread out, lambda = 0
    DEGENERATE = "degenerate"    # scores undefined or zero, lambda = 0
    SINGLE = "single"            # one input was all-zero, the other is returned


@dataclass(frozen=True)
class FusionTrace:
    """Intermediate quantities of one spatiotemporal fusion."""

    lam: float
    branch: Branch
    scores: Optional[ConsistencyScores] = None
    d_s: Optional[float] = None
    d_t: Optional[float] = None
    d_int: Optional[float] = None
    selected: str = "spatial"


def _check_dims(s: SaliencyMap, t: SaliencyMap):
    if s.shape != t.shape:
        raise DimensionMismatch(f"maps differ in size: {s.width}x{s.height} vs {t.width}x{t.height}")


def _dist(m: SaliencyMap) -> np.ndarray:
    return normalize_sum(m).values


def _entropy_of(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def entropy(m: SaliencyMap) -> float:
    """Shannon entropy (nats) of the sum-normalized pixel distribution."""
    return _entropy_of(_dist(m))


def consistency(s: SaliencyMap, t: SaliencyMap) -> ConsistencyScores:
    """Spatial-to-temporal and temporal-to-spatial consistency scores.

    Both are the entropy of the normalized product map divided by the entropy
    of the temporal (resp. spatial) map.
    """
    _check_dims(s, t)
    ps, pt = _dist(s), _dist(t)
    prod = ps * pt
    total = prod.sum()
    if not total > 0:
        raise AllZeroMap("spatial and temporal maps have disjoint supports")
    e_prod = _entropy_of(prod / total)
    e_s, e_t = _entropy_of(ps), _entropy_of(pt)
    if e_s <= 0 or e_t <= 0:
        raise ZeroEntropyDenominator("a single-pixel map has zero entropy")
    return ConsistencyScores(c_s2t=e_prod / e_t, c_t2s=e_prod / e_s)


def interaction_map(s: SaliencyMap, t: SaliencyMap, scores: ConsistencyScores) -> SaliencyMap:
    _check_dims(s, t)
    denom = scores.c_t2s + scores.c_s2t
    if not denom > 0:
        raise DegenerateScores("both consistency scores are zero")
    mixed = (scores.c_t2s * _dist(t) + scores.c_s2t * _dist(s)) / denom
    return normalize_sum(SaliencyMap(mixed))


def compactness(m: SaliencyMap) -> float:
    """Saliency-weighted mean distance (pixels) of pixels to the weighted centroid."""
    w = _dist(m)
    ys, xs = np.indices(w.shape, dtype=np.float64)
    cx, cy = (w * xs).sum(), (w * ys).sum()
    return float((w * np.hypot(xs - cx, ys - cy)).sum())


def select_map(s: SaliencyMap, t: SaliencyMap) -> SaliencyMap:
    """The more compact of the two maps; ties go to ``s``."""
    return s if compactness(s) <= compactness(t) else t


def fuse_traced(s: SaliencyMap, t: SaliencyMap, params: Optional[FusionParams] = None):
    """Fuse a spatial and a temporal map; returns ``(map, FusionTrace)``."""
    params = params or FusionParams()
    _check_dims(s, t)
    s_zero, t_zero = s.is_zero(), t.is_zero()
    if s_zero and t_zero:
        raise AllZeroMap("both spatial and temporal maps are all-zero")
    if s_zero or t_zero:
        keep, which = (t, "temporal") if s_zero else (s, "spatial")
        return normalize_sum(keep), FusionTrace(0.0, Branch.SINGLE, selected=which)

    s_n, t_n = normalize_sum(s), normalize_sum(t)
    d_s, d_t = compactness(s_n), compactness(t_n)
    sel, which = (s_n, "spatial") if d_s <= d_t else (t_n, "temporal")

    try:
        scores = consistency(s_n, t_n)
        s_int = interaction_map(s_n, t_n, scores)
    except (AllZeroMap, ZeroEntropyDenominator, DegenerateScores):
        return sel, FusionTrace(0.0, Branch.DEGENERATE, None, d_s, d_t, None, which)

    d_int = compactness(s_int)
    if d_int < params.omega * min(d_s, d_t):
        lam = min(max(min(scores.c_t2s, scores.c_s2t), 0.0), 1.0)
        branch = Branch.BLEND
    else:
        lam = 0.0
        branch = Branch.COMPACTNESS
    out = lam * s_int.values + (1.0 - lam) * sel.values
    trace = FusionTrace(lam, branch, scores, d_s, d_t, d_int, which)
    return normalize_sum(SaliencyMap(out)), trace


def fuse(s: SaliencyMap, t: SaliencyMap, params: Optional[FusionParams] = None) -> SaliencyMap:
    return fuse_traced(s, t, params)[0]


def spatial_ensemble_fuse(maps: Sequence[SaliencyMap]) -> SaliencyMap:
    """Mean of min-max normalized maps, sum-normalized."""
    if not maps:
        raise EmptyList("no maps to fuse")
    shape = maps[0].shape
    if any(m.shape != shape for m in maps):
        raise DimensionMismatch("ensemble maps must share dimensions")
    # per-pixel sort makes the floating-point sum independent of input order
    stack = np.sort(np.stack([normalize_minmax(m).values for m in maps]), axis=0)
    return normalize_sum(SaliencyMap(stack.sum(axis=0) / len(maps)))
