"""Saliency evaluation metrics: AUC-Judd, shuffled AUC, NSS, SIM and CC."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .core import SaliencyMap, bilinear_resize_array
from .errors import AllZeroMap, EmptyPool, NoFixations, ZeroVariance

METRIC_NAMES = ("auc", "sauc", "nss", "sim", "cc")


def _values(m) -> np.ndarray:
    return m.values if isinstance(m, SaliencyMap) else np.asarray(m, dtype=np.float64)


def _unique_pixels(points, shape) -> np.ndarray:
    """Deduplicated ``(x, y)`` integer pixel coordinates inside ``shape``."""
    if len(points) == 0:
        return np.empty((0, 2), dtype=np.intp)
    pts = np.unique(np.asarray(points, dtype=np.intp).reshape(-1, 2), axis=0)
    h, w = shape
    bad = (pts[:, 0] < 0) | (pts[:, 0] >= w) | (pts[:, 1] < 0) | (pts[:, 1] >= h)
    if np.any(bad):
        raise ValueError(f"fixation {tuple(pts[bad][0])} lies outside the {w}x{h} map")
    return pts


def _roc_area(pos: np.ndarray, neg: np.ndarray) -> float:
    """Trapezoidal ROC area with thresholds at the distinct positive values."""
    thresholds = np.unique(pos)[::-1]
    pos_sorted = np.sort(pos)
    neg_sorted = np.sort(neg)
    tp = (pos.size - np.searchsorted(pos_sorted, thresholds, side="left")) / pos.size
    fp = (neg.size - np.searchsorted(neg_sorted, thresholds, side="left")) / neg.size
    tpr = np.concatenate(([0.0], tp, [1.0]))
    fpr = np.concatenate(([0.0], fp, [1.0]))
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1])) / 2.0)


def auc(pred: SaliencyMap, fixations) -> float:
    """AUC-Judd: fixated pixels are positives, all other pixels negatives."""
    v = _values(pred)
    pts = _unique_pixels(fixations, v.shape)
    if pts.shape[0] == 0:
        raise NoFixations("AUC needs at least one fixation")
    flat_idx = pts[:, 1] * v.shape[1] + pts[:, 0]
    fixated = np.zeros(v.size, dtype=bool)
    fixated[flat_idx] = True
    pos, neg = v.ravel()[fixated], v.ravel()[~fixated]
    if neg.size == 0:
        return 1.0
    return _roc_area(pos, neg)


def sauc(pred: SaliencyMap, fixations, shuffle_pool) -> float:
    """Shuffled AUC: negatives are the saliency values at ``shuffle_pool`` points."""
    v = _values(pred)
    pts = _unique_pixels(fixations, v.shape)
    if pts.shape[0] == 0:
        raise NoFixations("sAUC needs at least one fixation")
    pool = np.asarray(shuffle_pool, dtype=np.intp).reshape(-1, 2) if len(shuffle_pool) else np.empty((0, 2), np.intp)
    if pool.shape[0] == 0:
        raise EmptyPool("sAUC needs a non-empty shuffle pool")
    _unique_pixels(pool, v.shape)  # bounds check
    pos = v[pts[:, 1], pts[:, 0]]
    neg = v[pool[:, 1], pool[:, 0]]
    return _roc_area(pos, neg)


def nss(pred: SaliencyMap, fixations) -> float:
    v = _values(pred)
    pts = _unique_pixels(fixations, v.shape)
    if pts.shape[0] == 0:
        raise NoFixations("NSS needs at least one fixation")
    if np.ptp(v) == 0:
        return 0.0  # rounding in std would otherwise give a spurious nonzero spread
    z = (v - v.mean()) / v.std()
    return float(z[pts[:, 1], pts[:, 0]].mean())


def _match(pred: np.ndarray, gt: np.ndarray) -> np.ndarray:
    # ground truth is brought to the prediction's resolution
    if gt.shape != pred.shape:
        gt = bilinear_resize_array(gt, pred.shape[1], pred.shape[0])
    return gt


def sim(pred: SaliencyMap, gt: SaliencyMap) -> float:
    """Histogram intersection of the two maps as distributions."""
    p = _values(pred)
    g = _match(p, _values(gt))
    sp, sg = p.sum(), g.sum()
    if not (sp > 0 and sg > 0):
        raise AllZeroMap("SIM needs two maps with positive mass")
    return float(np.minimum(p / sp, g / sg).sum())


def cc(pred: SaliencyMap, gt: SaliencyMap) -> float:
    """Pearson correlation over pixels."""
    p = _values(pred)
    g = _match(p, _values(gt))
    if np.ptp(p) == 0 or np.ptp(g) == 0:
        raise ZeroVariance("CC is undefined for a constant map")
    p = p - p.mean()
    g = g - g.mean()
    sp, sg = np.sqrt((p * p).sum()), np.sqrt((g * g).sum())
    return float(np.clip((p * g).sum() / (sp * sg), -1.0, 1.0))


def shuffle_pool(fixations_per_frame: Sequence[Sequence], frame: int, other_videos: Sequence = ()):
    """Negative points for sAUC on ``frame``.

    Uses the fixations of other videos when any are given, otherwise the
    fixations of every other frame of the same video. Pixels fixated on the
    current frame are removed.
    """
    current = {tuple(p) for p in fixations_per_frame[frame]}
    if len(other_videos):
        source = list(other_videos)
    else:
        source = [p for k, pts in enumerate(fixations_per_frame) if k != frame for p in pts]
    return [tuple(p) for p in source if tuple(p) not in current]


@dataclass
class FrameMetrics:
    frame: int
    auc: Optional[float] = None
    sauc: Optional[float] = None
    nss: Optional[float] = None
    sim: Optional[float] = None
    cc: Optional[float] = None


@dataclass
class MetricReport:
    auc: Optional[float]
    sauc: Optional[float]
    nss: Optional[float]
    sim: Optional[float]
    cc: Optional[float]
    frames: List[FrameMetrics] = field(default_factory=list)

    def to_dict(self) -> Dict:
        d = {name: getattr(self, name) for name in METRIC_NAMES}
        d["frames"] = [asdict(f) for f in self.frames]
        return d

    @classmethod
    def from_dict(cls, d: Dict) -> "MetricReport":
        return cls(*(d[n] for n in METRIC_NAMES), frames=[FrameMetrics(**f) for f in d["frames"]])


def _mean(vals) -> Optional[float]:
    vals = [v for v in vals if v is not None]
    return math.fsum(vals) / len(vals) if vals else None


def evaluate_sequence(preds: Sequence[SaliencyMap], gts: Sequence[SaliencyMap],
                      fixations: Sequence[Sequence], pool=None) -> MetricReport:
    """Per-frame metrics and their means.

    ``pool`` is either a flat list of points from other videos or ``None``, in
    which case :func:`shuffle_pool` draws from the sequence's other frames.
    Frames without fixations get no AUC/sAUC/NSS. SIM/CC are left empty when the
    ground truth or prediction makes them undefined (all-zero or constant map).
    """
    if not preds:
        raise ValueError("cannot evaluate an empty sequence")
    if not (len(preds) == len(gts) == len(fixations)):
        raise ValueError("predictions, ground truths and fixations must be frame-aligned")
    other = list(pool) if pool is not None else []
    rows = []
    for k, (p, g, fx) in enumerate(zip(preds, gts, fixations)):
        row = FrameMetrics(frame=k)
        if len(fx):
            row.auc = auc(p, fx)
            row.nss = nss(p, fx)
            negatives = shuffle_pool(fixations, k, other)
            if negatives:
                row.sauc = sauc(p, fx, negatives)
        try:
            row.sim = sim(p, g)
        except AllZeroMap:
            pass
        try:
            row.cc = cc(p, g)
        except ZeroVariance:
            pass
        rows.append(row)
    return MetricReport(*(_mean(getattr(r, n) for r in rows) for n in METRIC_NAMES), frames=rows)
