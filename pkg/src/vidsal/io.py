"""File formats: fixation CSV, video manifests, frames, PGM/PFM maps,
similarity CSV and metric reports."""
from __future__ import annotations

import csv
import json
import math
import re
from collections import OrderedDict
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np
from PIL import Image

from .core import NormState, SaliencyMap, VideoManifest, normalize_minmax
from .density import FixationRecord
from .errors import FrameDecodeError, ManifestInvalid, MissingHeader, ParseError
from .metrics import METRIC_NAMES, MetricReport
from .predictors import Frame
from .selection import SelectionMask, SimilarityMatrix

PathLike = Union[str, Path]

FIXATION_HEADER = ("video_id", "subject_id", "timestamp_s", "x_px", "y_px")
MAP_PATTERN = "frame_{:05d}.{}"


# -- fixations ---------------------------------------------------------------

def parse_fixation_csv(path: PathLike, bounds: Dict[str, tuple] = None) -> Dict[str, List[FixationRecord]]:
    """Read fixations grouped by video id, in file order.

    ``bounds`` optionally maps a video id to its ``(width, height)`` so that
    out-of-frame coordinates are rejected with their line number.
    """
    path = Path(path)
    out: Dict[str, List[FixationRecord]] = OrderedDict()
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingHeader("fixation file is empty, expected a header row", line=1) from None
        if tuple(h.strip() for h in header) != FIXATION_HEADER:
            raise MissingHeader(f"expected header {','.join(FIXATION_HEADER)}", line=1)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(FIXATION_HEADER):
                raise ParseError(f"expected {len(FIXATION_HEADER)} fields, got {len(row)}", line)
            vid, subj = row[0].strip(), row[1].strip()
            if not vid:
                raise ParseError("empty video_id", line)
            try:
                t, x, y = (float(c) for c in row[2:])
            except ValueError:
                raise ParseError("timestamp and coordinates must be numbers", line) from None
            if not all(math.isfinite(v) for v in (t, x, y)):
                raise ParseError("non-finite value", line)
            if t < 0:
                raise ParseError(f"negative timestamp {t}", line)
            if x < 0 or y < 0:
                raise ParseError(f"negative pixel coordinate ({x}, {y})", line)
            if bounds and vid in bounds:
                w, h = bounds[vid]
                if x >= w or y >= h:
                    raise ParseError(f"coordinate ({x}, {y}) outside {w}x{h} frame", line)
            out.setdefault(vid, []).append(FixationRecord(subj, t, x, y))
    return out


def write_fixation_csv(path: PathLike, fixations: Dict[str, Sequence[FixationRecord]]):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FIXATION_HEADER)
        for vid, recs in fixations.items():
            for r in recs:
                w.writerow([vid, r.subject_id, repr(r.t_f), repr(r.x_f), repr(r.y_f)])


# -- frames and manifests ----------------------------------------------------

def decode_frame(path: PathLike) -> np.ndarray:
    try:
        with Image.open(path) as im:
            if im.mode not in ("L", "RGB"):
                im = im.convert("RGB")
            return np.asarray(im)
    except (OSError, ValueError) as exc:
        raise FrameDecodeError(path, str(exc)) from exc


def load_manifest(path: PathLike, check_frames: bool = True) -> VideoManifest:
    """Load a JSON manifest (``video_id``, ``width``, ``height``, ``fps``, ``frames``).

    Frame paths are relative to the manifest's directory. With ``check_frames``
    every frame is decoded and its size compared with the declared one.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestInvalid(f"cannot read manifest {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ManifestInvalid("manifest must be a JSON object")
    missing = [k for k in ("video_id", "width", "height", "fps", "frames") if k not in data]
    if missing:
        raise ManifestInvalid(f"manifest lacks field(s): {', '.join(missing)}")
    frames = data["frames"]
    if not isinstance(frames, list) or not all(isinstance(f, str) for f in frames):
        raise ManifestInvalid("frames must be a list of relative paths")
    if isinstance(data["fps"], bool) or not isinstance(data["fps"], (int, float)):
        raise ManifestInvalid("fps must be a number")
    manifest = VideoManifest(
        video_id=str(data["video_id"]),
        width=data["width"],
        height=data["height"],
        fps=float(data["fps"]),
        frame_paths=[path.parent / f for f in frames],
    )
    if check_frames:
        for fp in manifest.frame_paths:
            arr = decode_frame(fp)
            if arr.shape[:2] != (manifest.height, manifest.width):
                raise FrameDecodeError(
                    fp, f"decoded size {arr.shape[1]}x{arr.shape[0]}, manifest declares "
                        f"{manifest.width}x{manifest.height}")
    return manifest


def write_manifest(path: PathLike, video_id: str, width: int, height: int, fps: float, frames: Sequence[str]):
    data = {"video_id": video_id, "width": width, "height": height, "fps": fps, "frames": list(frames)}
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def load_frames(manifest: VideoManifest) -> List[Frame]:
    return [Frame.from_array(decode_frame(p)) for p in manifest.frame_paths]


# -- maps --------------------------------------------------------------------

def write_map(m: SaliencyMap, path: PathLike, format: str = "pfm"):
    """Write ``m`` as 8-bit binary PGM (min-max scaled) or grayscale PFM (raw values)."""
    path = Path(path)
    if format == "pgm8":
        scaled = normalize_minmax(m).values
        data = np.rint(scaled * 255.0).astype(np.uint8)
        header = f"P5\n{m.width} {m.height}\n255\n".encode("ascii")
        payload = data.tobytes()
    elif format == "pfm":
        header = f"Pf\n{m.width} {m.height}\n-1.0\n".encode("ascii")
        # little-endian float32, rows stored bottom to top
        payload = np.ascontiguousarray(m.values[::-1], dtype="<f4").tobytes()
    else:
        raise ValueError(f"unknown map format {format!r}")
    with path.open("wb") as fh:
        fh.write(header)
        fh.write(payload)


_TOKEN = re.compile(rb"\S+")


def _header_tokens(buf: bytes, count: int):
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(buf) and buf[pos:pos + 1] == b"#":
            pos = buf.index(b"\n", pos) + 1
        m = _TOKEN.search(buf, pos)
        if m is None:
            raise ValueError("truncated header")
        tokens.append(m.group().decode("ascii"))
        pos = m.end()
    return tokens, pos + 1


def read_map(path: PathLike) -> SaliencyMap:
    """Read a PFM (grayscale) or binary PGM file."""
    buf = Path(path).read_bytes()
    magic = buf[:2]
    if magic == b"Pf":
        (_, w, h, scale), pos = _header_tokens(buf, 4)
        w, h, scale = int(w), int(h), float(scale)
        dtype = "<f4" if scale < 0 else ">f4"
        arr = np.frombuffer(buf, dtype=dtype, count=w * h, offset=pos).reshape(h, w)[::-1]
        return SaliencyMap(arr.astype(np.float64))
    if magic == b"P5":
        (_, w, h, maxval), pos = _header_tokens(buf, 4)
        w, h, maxval = int(w), int(h), int(maxval)
        arr = np.frombuffer(buf, dtype=np.uint8, count=w * h, offset=pos).reshape(h, w)
        return SaliencyMap(arr.astype(np.float64) / maxval, NormState.MIN_MAX)
    raise ValueError(f"{path}: not a PFM or binary PGM file")


def quantize(m: SaliencyMap) -> SaliencyMap:
    """The map as it reads back from PFM (single-precision values)."""
    return SaliencyMap(m.values.astype(np.float32).astype(np.float64), m.norm_state)


def write_map_dir(maps: Sequence[SaliencyMap], directory: PathLike, formats=("pfm",)):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for k, m in enumerate(maps):
        for fmt in formats:
            ext = "pgm" if fmt == "pgm8" else fmt
            write_map(m, directory / MAP_PATTERN.format(k, ext), fmt)


def read_map_dir(directory: PathLike) -> List[SaliencyMap]:
    directory = Path(directory)
    files = sorted(directory.glob("frame_*.pfm"))
    if not files:
        raise FileNotFoundError(f"no frame_*.pfm maps in {directory}")
    return [read_map(f) for f in files]


# -- similarity and selection ------------------------------------------------

def write_similarity_csv(sim: SimilarityMatrix, path: PathLike):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(sim.names)
        for row in sim.entries:
            w.writerow([repr(float(v)) for v in row])


def read_similarity_csv(path: PathLike) -> SimilarityMatrix:
    with Path(path).open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise MissingHeader("similarity file is empty", line=1)
    names = [n.strip() for n in rows[0]]
    body = rows[1:]
    if len(body) != len(names):
        raise ParseError(f"expected {len(names)} matrix rows, got {len(body)}")
    values = []
    for i, r in enumerate(body, start=2):
        if len(r) != len(names):
            raise ParseError(f"expected {len(names)} values", line=i)
        try:
            values.append([float(v) for v in r])
        except ValueError:
            raise ParseError("non-numeric similarity value", line=i) from None
    return SimilarityMatrix(np.array(values), tuple(names))


def selection_to_dict(mask: SelectionMask, names: Sequence[str], objective_value: float, solver: str) -> dict:
    return {
        "solver": solver,
        "predictors": list(names),
        "alpha": [int(a) for a in mask.alpha],
        "selected": [names[i] for i in mask.indices],
        "objective": objective_value,
    }


# -- reports -----------------------------------------------------------------

def write_report(report: MetricReport, path: PathLike, format: str = "json"):
    path = Path(path)
    if format == "json":
        path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    elif format == "csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("frame",) + METRIC_NAMES)
            for f in report.frames:
                w.writerow([f.frame] + ["" if getattr(f, n) is None else repr(getattr(f, n)) for n in METRIC_NAMES])
            w.writerow(["mean"] + ["" if getattr(report, n) is None else repr(getattr(report, n)) for n in METRIC_NAMES])
    else:
        raise ValueError(f"unknown report format {format!r}")


def read_report(path: PathLike) -> MetricReport:
    return MetricReport.from_dict(json.loads(Path(path).read_text()))
