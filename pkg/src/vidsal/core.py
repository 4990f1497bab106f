"""Saliency map container, normalization and resampling.

Every stage of the toolkit exchanges :class:`SaliencyMap` objects. Values are
kept as a read-only ``float64`` array of shape ``(height, width)``; 8-bit data
only appears at the I/O boundary.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

import numpy as np

from .errors import AllZeroMap, ManifestInvalid

__all__ = [
    "NormState",
    "SaliencyMap",
    "VideoManifest",
    "normalize_sum",
    "normalize_minmax",
    "resize",
    "bilinear_resize_array",
]

SUM_TOL = 1e-9


class NormState(str, enum.Enum):
    RAW = "raw"
    SUM_ONE = "sum_one"
    MIN_MAX = "min_max"


@dataclass(frozen=True, eq=False)
class SaliencyMap:
    """Immutable W x H grid of non-negative reals.

    ``values`` is indexed ``[y, x]`` (row-major). Tiny negative round-off
    (above ``-1e-12``) is clipped to zero; anything more negative is rejected.
    """

    values: np.ndarray
    norm_state: NormState = NormState.RAW

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"saliency map must be a non-empty 2-D grid, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("saliency map contains non-finite values")
        if arr.min() < -1e-12:
            raise ValueError(f"saliency map has negative value {arr.min()!r}")
        np.maximum(arr, 0.0, out=arr)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "norm_state", NormState(self.norm_state))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self):
        return self.values.shape

    @classmethod
    def zeros(cls, width: int, height: int) -> "SaliencyMap":
        return cls(np.zeros((height, width)))

    def total(self) -> float:
        return float(self.values.sum())

    def is_zero(self) -> bool:
        return not np.any(self.values > 0)

    def __repr__(self):
        return f"SaliencyMap({self.width}x{self.height}, {self.norm_state.value})"


def _as_array(m) -> np.ndarray:
    return m.values if isinstance(m, SaliencyMap) else np.asarray(m, dtype=np.float64)


def normalize_sum(m: SaliencyMap) -> SaliencyMap:
    """Scale ``m`` to a probability distribution over pixels."""
    v = _as_array(m)
    total = v.sum()
    if not total > 0:
        raise AllZeroMap("cannot sum-normalize a map with no positive values")
    return SaliencyMap(v / total, NormState.SUM_ONE)


def normalize_minmax(m: SaliencyMap) -> SaliencyMap:
    # constant maps carry no ordering and become all zeros
    v = _as_array(m)
    lo, hi = v.min(), v.max()
    if hi - lo <= 0:
        return SaliencyMap(np.zeros_like(v), NormState.MIN_MAX)
    out = (v - lo) / (hi - lo)
    return SaliencyMap(np.clip(out, 0.0, 1.0), NormState.MIN_MAX)


def _axis_weights(n_in: int, n_out: int):
    # half-pixel centre alignment, edge-clamped
    pos = (np.arange(n_out, dtype=np.float64) + 0.5) * (n_in / n_out) - 0.5
    pos = np.clip(pos, 0.0, n_in - 1)
    i0 = np.floor(pos).astype(np.intp)
    i1 = np.minimum(i0 + 1, n_in - 1)
    frac = pos - i0
    return i0, i1, frac


def bilinear_resize_array(a: np.ndarray, width: int, height: int) -> np.ndarray:
    """Bilinear resampling of a 2-D array to ``(height, width)``."""
    a = np.asarray(a, dtype=np.float64)
    h_in, w_in = a.shape
    if (h_in, w_in) == (height, width):
        return a.copy()
    y0, y1, fy = _axis_weights(h_in, height)
    x0, x1, fx = _axis_weights(w_in, width)
    rows = a[y0, :] * (1.0 - fy)[:, None] + a[y1, :] * fy[:, None]
    return rows[:, x0] * (1.0 - fx)[None, :] + rows[:, x1] * fx[None, :]


def resize(m: SaliencyMap, w: int, h: int) -> SaliencyMap:
    if w < 1 or h < 1:
        raise ValueError(f"target size must be at least 1x1, got {w}x{h}")
    return SaliencyMap(bilinear_resize_array(_as_array(m), w, h), NormState.RAW)


@dataclass(frozen=True)
class VideoManifest:
    """A decoded-frame video: ordered frame files plus geometry and rate."""

    video_id: str
    width: int
    height: int
    fps: float
    frame_paths: List[Path] = field(default_factory=list)

    def __post_init__(self):
        if not self.video_id:
            raise ManifestInvalid("video_id must be non-empty")
        if not (isinstance(self.width, int) and isinstance(self.height, int)) or self.width < 1 or self.height < 1:
            raise ManifestInvalid(f"invalid frame size {self.width!r}x{self.height!r}")
        if not self.fps > 0:
            raise ManifestInvalid(f"fps must be positive, got {self.fps!r}")
        if not self.frame_paths:
            raise ManifestInvalid("manifest lists no frames")
        object.__setattr__(self, "frame_paths", [Path(p) for p in self.frame_paths])

    @property
    def n_frames(self) -> int:
        return len(self.frame_paths)

    def frame_time(self, k: int) -> float:
        """Presentation time (seconds) of frame ``k``."""
        return k / self.fps
