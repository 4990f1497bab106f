"""Synthetic moving-blob videos with simulated fixations, for tests and demos."""
from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np
from PIL import Image
from scipy import ndimage

from .density import FixationRecord
from .io import write_fixation_csv, write_manifest


def blob_centers(n_frames: int, width: int, height: int) -> List[Tuple[float, float]]:
    """Blob trajectory: left to right across the middle with a vertical wobble."""
    xs = np.linspace(0.25 * width, 0.75 * width, n_frames)
    ys = 0.5 * height + 0.15 * height * np.sin(np.linspace(0, 2 * np.pi, n_frames))
    return list(zip(xs.tolist(), ys.tolist()))


def render_frames(n_frames=30, width=64, height=64, radius=5.0, seed=0) -> List[np.ndarray]:
    rng = np.random.default_rng(seed)
    texture = ndimage.gaussian_filter(rng.random((height, width)), 1.5)
    texture = 0.2 + 0.3 * (texture - texture.min()) / (texture.max() - texture.min())
    yy, xx = np.mgrid[:height, :width]
    frames = []
    for cx, cy in blob_centers(n_frames, width, height):
        r = np.hypot(xx - cx, yy - cy)
        # soft-edged disc
        blob = np.clip(radius + 0.5 - r, 0.0, 1.0)
        img = texture * (1 - blob) + 1.0 * blob
        frames.append(np.rint(img * 255).astype(np.uint8))
    return frames


def sample_fixations(n_frames=30, width=64, height=64, fps=30.0, n_subjects=8, sigma=3.0,
                     seed=1, video_id="blob") -> List[FixationRecord]:
    """One fixation per subject per frame, scattered around the blob centre."""
    rng = np.random.default_rng(seed)
    out = []
    for k, (cx, cy) in enumerate(blob_centers(n_frames, width, height)):
        for s in range(n_subjects):
            x = float(np.clip(np.rint(cx + rng.normal(0, sigma)), 0, width - 1))
            y = float(np.clip(np.rint(cy + rng.normal(0, sigma)), 0, height - 1))
            t = (k + rng.uniform(0.05, 0.95)) / fps
            out.append(FixationRecord(f"s{s:02d}", round(t, 6), x, y))
    return out


def write_blob_video(directory, n_frames=30, width=64, height=64, fps=30.0, video_id="blob",
                     seed=0) -> Dict[str, Path]:
    """Write frames, ``manifest.json`` and ``fixations.csv`` under ``directory``."""
    directory = Path(directory)
    (directory / "frames").mkdir(parents=True, exist_ok=True)
    names = []
    for k, img in enumerate(render_frames(n_frames, width, height, seed=seed)):
        name = f"frames/{k:05d}.png"
        Image.fromarray(img, mode="L").save(directory / name)
        names.append(name)
    write_manifest(directory / "manifest.json", video_id, width, height, fps, names)
    fix = sample_fixations(n_frames, width, height, fps, seed=seed + 1, video_id=video_id)
    write_fixation_csv(directory / "fixations.csv", {video_id: fix})
    return {"manifest": directory / "manifest.json", "fixations": directory / "fixations.csv"}
