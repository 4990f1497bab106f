"""Command line interface: ``vidsal <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import SaliencyError
from .io import (load_frames, load_manifest, parse_fixation_csv, read_map_dir, read_similarity_csv,
                 selection_to_dict, write_map_dir, write_report, write_similarity_csv)
from .pipeline import (RunConfig, SOLVERS, compute_fused, compute_ground_truth, compute_predictions,
                       compute_report, compute_spatial, run_pipeline)
from .predictors import PREDICTOR_NAMES, SPATIAL_PREDICTORS
from .selection import objective, select, similarity_matrix

log = logging.getLogger("vidsal")


def _resolution(text):
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None


def _name_list(text):
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _add_density_flags(p):
    p.add_argument("--sigma-d-frac", type=float, default=0.03,
                   help="spatial std as a fraction of the larger frame side (default 0.03)")
    p.add_argument("--sigma-t", type=float, default=0.1, help="temporal std in seconds (default 0.1)")


def _add_selection_flags(p):
    p.add_argument("--lambda-d", type=float, default=0.2, help="diversity weight (default 0.2)")
    p.add_argument("--epsilon", type=float, default=1e-8)
    p.add_argument("--resolution", type=_resolution, default=(320, 320),
                   help="working resolution for similarity, WxH (default 320x320)")
    p.add_argument("--solver", choices=SOLVERS, default="exhaustive")


def _add_fusion_flags(p, epsilon=True):
    p.add_argument("--omega", type=float, default=2.1, help="compactness threshold (default 2.1)")
    if epsilon:
        p.add_argument("--epsilon", type=float, default=1e-8)


def _add_report_flag(p):
    p.add_argument("--report", type=_name_list, default=("json", "csv"),
                   help="comma-separated report formats: json, csv (default both)")


def build_parser():
    parser = argparse.ArgumentParser(prog="vidsal", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="fixations -> ground-truth density maps")
    p.add_argument("--manifest", required=True)
    p.add_argument("--fixations", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--pgm", action="store_true", help="also write 8-bit PGM previews")
    _add_density_flags(p)

    p = sub.add_parser("predict", help="frames -> predictor maps")
    p.add_argument("--manifest", required=True)
    p.add_argument("--predictors", type=_name_list, default=PREDICTOR_NAMES)
    p.add_argument("--out", required=True)

    p = sub.add_parser("select", help="predictor maps or similarity CSV -> selection mask")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--similarity", help="similarity matrix CSV")
    src.add_argument("--maps", help="directory with one sub-directory of maps per predictor")
    p.add_argument("--predictors", type=_name_list, default=None,
                   help="predictors to consider when reading --maps (default: spatial ones found)")
    p.add_argument("--out", required=True)
    _add_selection_flags(p)

    p = sub.add_parser("fuse", help="spatial + temporal maps -> fused maps")
    p.add_argument("--spatial", nargs="+", required=True,
                   help="one or more map directories; several are ensemble-averaged first")
    p.add_argument("--temporal", help="temporal map directory (omit to skip spatiotemporal fusion)")
    p.add_argument("--out", required=True)
    p.add_argument("--pgm", action="store_true")
    _add_fusion_flags(p)

    p = sub.add_parser("eval", help="predicted vs ground-truth maps + fixations -> report")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--fixations", required=True)
    p.add_argument("--out", required=True)
    _add_report_flag(p)

    p = sub.add_parser("pipeline", help="run every stage")
    p.add_argument("--manifest", required=True)
    p.add_argument("--fixations", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--predictors", type=_name_list, default=PREDICTOR_NAMES)
    p.add_argument("--pgm", action="store_true")
    _add_density_flags(p)
    _add_selection_flags(p)
    _add_fusion_flags(p, epsilon=False)
    _add_report_flag(p)

    p = sub.add_parser("synth", help="write a synthetic moving-blob video with fixations")
    p.add_argument("--out", required=True)
    p.add_argument("--frames", type=int, default=30)
    p.add_argument("--size", type=_resolution, default=(64, 64))
    p.add_argument("--fps", type=float, default=30.0)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _config(args, **overrides) -> RunConfig:
    fields = dict(
        sigma_d_frac=getattr(args, "sigma_d_frac", 0.03),
        sigma_t=getattr(args, "sigma_t", 0.1),
        lambda_d=getattr(args, "lambda_d", 0.2),
        omega=getattr(args, "omega", 2.1),
        epsilon=getattr(args, "epsilon", 1e-8),
        working_resolution=getattr(args, "resolution", (320, 320)),
        solver=getattr(args, "solver", "exhaustive"),
        out=args.out,
        report_formats=getattr(args, "report", ("json", "csv")),
        pgm_previews=getattr(args, "pgm", False),
    )
    fields.update(overrides)
    return RunConfig(**fields)


def _bounds_for(manifest):
    return {manifest.video_id: (manifest.width, manifest.height)}


def cmd_density(args):
    config = _config(args)
    manifest = load_manifest(args.manifest, check_frames=False)
    fixations = parse_fixation_csv(args.fixations, _bounds_for(manifest)).get(manifest.video_id, [])
    if not fixations:
        log.warning("no fixations for video %s; maps will be all-zero", manifest.video_id)
    maps = compute_ground_truth(manifest, fixations, config)
    write_map_dir(maps, args.out, ("pfm", "pgm8") if args.pgm else ("pfm",))
    print(f"wrote {len(maps)} density maps to {args.out}")


def cmd_predict(args):
    unknown = [p for p in args.predictors if p not in PREDICTOR_NAMES]
    if unknown:
        raise SystemExit(f"unknown predictor(s): {', '.join(unknown)}")
    manifest = load_manifest(args.manifest)
    preds = compute_predictions(load_frames(manifest), args.predictors)
    for name, maps in preds.items():
        write_map_dir(maps, Path(args.out) / name)
    print(f"wrote {len(preds)} x {manifest.n_frames} predictor maps to {args.out}")


def cmd_select(args):
    config = _config(args, predictors=SPATIAL_PREDICTORS)
    if args.similarity:
        sim = read_similarity_csv(args.similarity)
    else:
        root = Path(args.maps)
        names = args.predictors or [n for n in SPATIAL_PREDICTORS if (root / n).is_dir()]
        if not names:
            raise SystemExit(f"no predictor map directories found under {root}")
        maps = {n: read_map_dir(root / n) for n in names}
        w, h = config.working_resolution
        sim = similarity_matrix(maps, w, h)
    params = config.selection_params()
    mask = select(sim, params, config.solver)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_similarity_csv(sim, out / "similarity.csv")
    sel = selection_to_dict(mask, sim.names, objective(mask, sim, params), config.solver)
    (out / "selection.json").write_text(json.dumps(sel, indent=2) + "\n")
    print("selected: " + ", ".join(sel["selected"]))


def cmd_fuse(args):
    config = _config(args)
    out = Path(args.out)
    previews = ("pfm", "pgm8") if args.pgm else ("pfm",)
    groups = {str(i): read_map_dir(d) for i, d in enumerate(args.spatial)}
    if len(groups) == 1:
        spatial = groups["0"]
    else:
        spatial = compute_spatial(groups, list(groups))
        write_map_dir(spatial, out / "spatial", previews)
    temporal = read_map_dir(args.temporal) if args.temporal else None
    fused, traces = compute_fused(spatial, temporal, config)
    write_map_dir(fused, out / "fused", previews)
    print(f"wrote {len(fused)} fused maps to {out / 'fused'}")


def cmd_eval(args):
    manifest = load_manifest(args.manifest, check_frames=False)
    fixations = parse_fixation_csv(args.fixations, _bounds_for(manifest))
    preds, gts = read_map_dir(args.pred), read_map_dir(args.gt)
    if not (len(preds) == len(gts) == manifest.n_frames):
        raise SystemExit("prediction, ground-truth and manifest frame counts differ")
    report = compute_report(preds, gts, manifest, fixations)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for fmt in args.report:
        write_report(report, out / f"report.{fmt}", fmt)
    print(_summary(report))


def cmd_pipeline(args):
    config = _config(args, predictors=args.predictors)
    result = run_pipeline(config, args.manifest, args.fixations)
    print("selected: " + ", ".join(result.selected))
    print(_summary(result.report))


def cmd_synth(args):
    from .synthetic import write_blob_video
    w, h = args.size
    paths = write_blob_video(args.out, args.frames, w, h, args.fps, seed=args.seed)
    print(f"manifest: {paths['manifest']}\nfixations: {paths['fixations']}")


def _summary(report):
    parts = []
    for name in ("auc", "sauc", "nss", "sim", "cc"):
        v = getattr(report, name)
        parts.append(f"{name}={'n/a' if v is None else f'{v:.4f}'}")
    return " ".join(parts)


COMMANDS = {
    "density": cmd_density,
    "predict": cmd_predict,
    "select": cmd_select,
    "fuse": cmd_fuse,
    "eval": cmd_eval,
    "pipeline": cmd_pipeline,
    "synth": cmd_synth,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (SaliencyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
