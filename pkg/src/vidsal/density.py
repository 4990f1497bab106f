"""Ground-truth fixation density maps from eye-tracking fixations.

For a frame presented at time ``t`` every fixation recorded at or after ``t``
contributes a spatial Gaussian (std ``sigma_d`` pixels) scaled by a temporal
Gaussian of its delay (std ``sigma_t`` seconds).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from . import kernels
from .core import NormState, SaliencyMap

DEFAULT_SIGMA_FRAC = 0.03
DEFAULT_SIGMA_T = 0.1
DEFAULT_EPSILON_CUTOFF = 1e-4


@dataclass(frozen=True)
class FixationRecord:
    subject_id: str
    t_f: float
    x_f: float
    y_f: float

    def __post_init__(self):
        if not self.t_f >= 0:
            raise ValueError(f"fixation time must be >= 0, got {self.t_f!r}")


@dataclass(frozen=True)
class DensityParams:
    sigma_d: float
    sigma_t: float = DEFAULT_SIGMA_T
    epsilon_cutoff: float = DEFAULT_EPSILON_CUTOFF

    def __post_init__(self):
        if not self.sigma_d > 0:
            raise ValueError("sigma_d must be positive")
        if not self.sigma_t > 0:
            raise ValueError("sigma_t must be positive")
        if not 0 <= self.epsilon_cutoff < 1:
            raise ValueError("epsilon_cutoff must lie in [0, 1)")

    @classmethod
    def for_frame(cls, width, height, sigma_d_frac=DEFAULT_SIGMA_FRAC,
                  sigma_t=DEFAULT_SIGMA_T, epsilon_cutoff=DEFAULT_EPSILON_CUTOFF):
        return cls(sigma_d_frac * max(width, height), sigma_t, epsilon_cutoff)


def default_sigma_spatial(width: int, height: int) -> float:
    """3% of the larger frame dimension."""
    if width < 1 or height < 1:
        raise ValueError("frame dimensions must be >= 1")
    return DEFAULT_SIGMA_FRAC * max(width, height)


def temporal_weights(times: np.ndarray, t: float, sigma_t: float, epsilon_cutoff: float = 0.0):
    """Per-fixation temporal factor; zero for fixations before ``t`` or below the cutoff."""
    times = np.asarray(times, dtype=np.float64)
    dt = times - t
    w = np.exp(-(dt * dt) / (2.0 * sigma_t * sigma_t))
    w[times < t] = 0.0
    if epsilon_cutoff > 0:
        w[w < epsilon_cutoff] = 0.0
    return w


def density_map(fixations: Sequence[FixationRecord], t: float, width: int, height: int,
                params: Optional[DensityParams] = None) -> SaliencyMap:
    if params is None:
        params = DensityParams(default_sigma_spatial(width, height))
    for f in fixations:
        if not (0 <= f.x_f < width and 0 <= f.y_f < height):
            raise ValueError(f"fixation ({f.x_f}, {f.y_f}) outside {width}x{height} frame")
    if not fixations:
        return SaliencyMap.zeros(width, height)
    times = np.fromiter((f.t_f for f in fixations), dtype=np.float64, count=len(fixations))
    w = temporal_weights(times, t, params.sigma_t, params.epsilon_cutoff)
    keep = w > 0
    if not np.any(keep):
        return SaliencyMap.zeros(width, height)
    xs = np.fromiter((f.x_f for f in fixations), dtype=np.float64, count=len(fixations))[keep]
    ys = np.fromiter((f.y_f for f in fixations), dtype=np.float64, count=len(fixations))[keep]
    values = kernels.density_accumulate(xs, ys, w[keep], width, height, params.sigma_d)
    return SaliencyMap(values, NormState.RAW)


def density_sequence(fixations: Sequence[FixationRecord], n_frames: int, fps: float,
                     width: int, height: int, params: Optional[DensityParams] = None) -> List[SaliencyMap]:
    """Density maps for frames ``0..n_frames-1`` shown at ``k / fps``."""
    return [density_map(fixations, k / fps, width, height, params) for k in range(n_frames)]


def frame_index(t_f: float, fps: float) -> int:
    # tiny slack so timestamps written as k/fps land on frame k
    return int(math.floor(t_f * fps + 1e-9))


def fixations_by_frame(fixations: Iterable[FixationRecord], n_frames: int, fps: float):
    """Integer pixel coordinates ``(x, y)`` of the fixations shown during each frame."""
    per_frame: List[List[tuple]] = [[] for _ in range(n_frames)]
    for f in fixations:
        k = frame_index(f.t_f, fps)
        if 0 <= k < n_frames:
            per_frame[k].append((int(f.x_f), int(f.y_f)))
    return per_frame
