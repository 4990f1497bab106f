"""End-to-end runs: ground truth, predictor bank, selection, spatial ensemble,
spatiotemporal fusion and evaluation, with every intermediate persisted."""
from __future__ import annotations

import json
import logging
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy

from . import __version__, kernels
from .core import SaliencyMap, VideoManifest
from .density import DensityParams, FixationRecord, density_sequence, fixations_by_frame
from .errors import StageError
from .fusion import FusionParams, FusionTrace, fuse_traced, spatial_ensemble_fuse
from .io import (load_frames, load_manifest, parse_fixation_csv, quantize, selection_to_dict,
                 write_map_dir, write_report, write_similarity_csv)
from .metrics import MetricReport, evaluate_sequence
from .predictors import PREDICTOR_CONFIG, PREDICTOR_NAMES, SPATIAL_PREDICTORS, run_bank
from .selection import SelectionMask, SelectionParams, SimilarityMatrix, objective, select, similarity_matrix

log = logging.getLogger(__name__)

SOLVERS = ("exhaustive", "greedy")


@dataclass
class RunConfig:
    sigma_d_frac: float = 0.03
    sigma_t: float = 0.1
    lambda_d: float = 0.2
    omega: float = 2.1
    epsilon: float = 1e-8
    working_resolution: Tuple[int, int] = (320, 320)
    predictors: Tuple[str, ...] = PREDICTOR_NAMES
    solver: str = "exhaustive"
    out: Optional[str] = None
    report_formats: Tuple[str, ...] = ("json", "csv")
    pgm_previews: bool = False

    def __post_init__(self):
        for name in ("sigma_d_frac", "sigma_t", "omega", "epsilon"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.lambda_d >= 0:
            raise ValueError("lambda_d must be >= 0")
        w, h = self.working_resolution
        if w < 1 or h < 1:
            raise ValueError("working resolution must be at least 1x1")
        self.working_resolution = (int(w), int(h))
        self.predictors = tuple(self.predictors)
        unknown = [p for p in self.predictors if p not in PREDICTOR_NAMES]
        if unknown:
            raise ValueError(f"unknown predictor(s): {', '.join(unknown)}")
        if not any(p in SPATIAL_PREDICTORS for p in self.predictors):
            raise ValueError("at least one spatial predictor is required")
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}")

    def density_params(self, width, height) -> DensityParams:
        return DensityParams.for_frame(width, height, self.sigma_d_frac, self.sigma_t)

    def selection_params(self) -> SelectionParams:
        return SelectionParams(self.lambda_d, self.epsilon)

    def fusion_params(self) -> FusionParams:
        return FusionParams(self.omega, self.epsilon)

    @property
    def spatial_predictors(self) -> List[str]:
        return [p for p in self.predictors if p in SPATIAL_PREDICTORS]

    @property
    def has_temporal(self) -> bool:
        return "temporal_diff" in self.predictors


@dataclass
class PipelineResult:
    report: MetricReport
    ground_truth: List[SaliencyMap]
    predictor_maps: Dict[str, List[SaliencyMap]]
    similarity: SimilarityMatrix
    mask: SelectionMask
    spatial: List[SaliencyMap]
    fused: List[SaliencyMap]
    traces: List[Optional[FusionTrace]] = field(default_factory=list)

    @property
    def selected(self) -> List[str]:
        return [self.similarity.names[i] for i in self.mask.indices]


# -- stages --------------------------------------------------------------------

def compute_ground_truth(manifest: VideoManifest, fixations: Sequence[FixationRecord], config: RunConfig):
    params = config.density_params(manifest.width, manifest.height)
    maps = density_sequence(fixations, manifest.n_frames, manifest.fps, manifest.width, manifest.height, params)
    return [quantize(m) for m in maps]


def compute_predictions(frames, names: Sequence[str]) -> Dict[str, List[SaliencyMap]]:
    bank = run_bank(frames, list(names))
    n = len(frames)
    return {name: [quantize(bank[(k, name)]) for k in range(n)] for name in names}


def compute_selection(spatial_maps: Dict[str, List[SaliencyMap]], config: RunConfig):
    w, h = config.working_resolution
    sim = similarity_matrix(spatial_maps, w, h)
    params = config.selection_params()
    mask = select(sim, params, config.solver)
    return sim, mask, objective(mask, sim, params)


def compute_spatial(spatial_maps: Dict[str, List[SaliencyMap]], selected: Sequence[str]) -> List[SaliencyMap]:
    n = len(next(iter(spatial_maps.values())))
    return [quantize(spatial_ensemble_fuse([spatial_maps[name][k] for name in selected])) for k in range(n)]


def compute_fused(spatial: Sequence[SaliencyMap], temporal: Optional[Sequence[SaliencyMap]], config: RunConfig):
    if temporal is None:
        return list(spatial), [None] * len(spatial)
    if len(temporal) != len(spatial):
        raise ValueError("spatial and temporal sequences differ in length")
    params = config.fusion_params()
    fused, traces = [], []
    for s, t in zip(spatial, temporal):
        m, tr = fuse_traced(s, t, params)
        fused.append(quantize(m))
        traces.append(tr)
    return fused, traces


def shuffle_pool_from_other_videos(all_fixations: Dict[str, List[FixationRecord]], video_id: str,
                                   width: int, height: int):
    pool = []
    for vid, recs in all_fixations.items():
        if vid == video_id:
            continue
        pool.extend((int(r.x_f), int(r.y_f)) for r in recs if r.x_f < width and r.y_f < height)
    return pool


def compute_report(fused, gts, manifest: VideoManifest, all_fixations: Dict[str, List[FixationRecord]]):
    own = all_fixations.get(manifest.video_id, [])
    per_frame = fixations_by_frame(own, manifest.n_frames, manifest.fps)
    pool = shuffle_pool_from_other_videos(all_fixations, manifest.video_id, manifest.width, manifest.height)
    return evaluate_sequence(fused, gts, per_frame, pool or None)


def run_manifest(config: RunConfig, manifest: VideoManifest, extra: Optional[dict] = None) -> dict:
    cfg = asdict(config)
    del cfg["out"]  # the manifest lives in that directory; keeping it would tie the bytes to the location
    cfg["working_resolution"] = list(config.working_resolution)
    cfg["predictors"] = list(config.predictors)
    cfg["report_formats"] = list(config.report_formats)
    data = {
        "config": cfg,
        "video": {"video_id": manifest.video_id, "width": manifest.width, "height": manifest.height,
                  "fps": manifest.fps, "n_frames": manifest.n_frames},
        "predictor_config": PREDICTOR_CONFIG,
        "versions": {"vidsal": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "kernel_backend": kernels.BACKEND,
    }
    if extra:
        data.update(extra)
    return data


def _stage(name, fn, *args):
    log.info("stage %s", name)
    try:
        return fn(*args)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def run_pipeline(config: RunConfig, manifest, fixations) -> PipelineResult:
    """Run every stage and, when ``config.out`` is set, persist all artifacts.

    ``manifest`` may be a :class:`VideoManifest` or a manifest path;
    ``fixations`` may be the parsed ``{video_id: records}`` mapping or a CSV
    path. Inputs are validated before any predictor runs.
    """
    if not isinstance(manifest, VideoManifest):
        manifest = _stage("load", load_manifest, manifest)
    if not isinstance(fixations, dict):
        path = Path(fixations)
        if not path.is_file():
            raise StageError("load", FileNotFoundError(f"fixation file not found: {path}"))
        bounds = {manifest.video_id: (manifest.width, manifest.height)}
        fixations = _stage("load", parse_fixation_csv, path, bounds)
    own = fixations.get(manifest.video_id)
    if not own:
        raise StageError("load", ValueError(f"no fixations recorded for video '{manifest.video_id}'"))
    frames = _stage("load", load_frames, manifest)

    gts = _stage("density", compute_ground_truth, manifest, own, config)
    preds = _stage("predict", compute_predictions, frames, config.predictors)
    spatial_maps = {n: preds[n] for n in config.spatial_predictors}
    sim, mask, obj = _stage("select", compute_selection, spatial_maps, config)
    selected = [sim.names[i] for i in mask.indices]
    log.info("selected predictors: %s (objective %.6f)", ", ".join(selected), obj)
    spatial = _stage("spatial", compute_spatial, spatial_maps, selected)
    temporal = preds["temporal_diff"] if config.has_temporal else None
    fused, traces = _stage("fuse", compute_fused, spatial, temporal, config)
    report = _stage("eval", compute_report, fused, gts, manifest, fixations)

    result = PipelineResult(report, gts, preds, sim, mask, spatial, fused, traces)
    if config.out:
        _stage("write", write_outputs, result, config, manifest, obj)
    return result


def write_outputs(result: PipelineResult, config: RunConfig, manifest: VideoManifest, obj: float):
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    previews = ("pfm", "pgm8") if config.pgm_previews else ("pfm",)
    write_map_dir(result.ground_truth, out / "gt", previews)
    for name, maps in result.predictor_maps.items():
        write_map_dir(maps, out / "predictors" / name)
    write_similarity_csv(result.similarity, out / "similarity.csv")
    selection = selection_to_dict(result.mask, result.similarity.names, obj, config.solver)
    (out / "selection.json").write_text(json.dumps(selection, indent=2) + "\n")
    write_map_dir(result.spatial, out / "spatial", previews)
    write_map_dir(result.fused, out / "fused", previews)
    for fmt in config.report_formats:
        write_report(result.report, out / f"report.{fmt}", fmt)
    lambdas = [None if t is None else t.lam for t in result.traces]
    branches = [None if t is None else t.branch.value for t in result.traces]
    meta = run_manifest(config, manifest, {"selection": selection,
                                           "fusion": {"lambda": lambdas, "branch": branches}})
    (out / "run_manifest.json").write_text(json.dumps(meta, indent=2) + "\n")
