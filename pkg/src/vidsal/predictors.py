"""Deterministic classical saliency predictors.

Four spatial predictors (spectral residual, multiscale center-surround, global
contrast, frequency-tuned) and one temporal predictor (smoothed absolute frame
difference). All return raw, non-negative maps at the input resolution.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from .core import NormState, SaliencyMap, bilinear_resize_array
from .errors import DimensionMismatch, EmptyList, FrameTooSmall

# versioned so that a change of any constant is visible in run manifests
PREDICTOR_CONFIG = {
    "version": 1,
    "spectral_residual": {"working_size": 64, "avg_kernel": 3, "sigma": 3.0},
    "center_surround": {"scale_pairs": [[1.0, 4.0], [2.0, 8.0], [4.0, 16.0]]},
    "global_contrast": {"sigma": 3.0},
    "frequency_tuned": {"sigma": 1.0},
    "temporal_diff": {"sigma": 2.0},
}

SPATIAL_PREDICTORS = ("spectral_residual", "center_surround", "global_contrast", "frequency_tuned")
TEMPORAL_PREDICTORS = ("temporal_diff",)
PREDICTOR_NAMES = SPATIAL_PREDICTORS + TEMPORAL_PREDICTORS

MIN_SIZE = 8

# BT.601 luma and scaled colour differences
_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True, eq=False)
class Frame:
    luminance: np.ndarray
    chroma: Optional[Tuple[np.ndarray, np.ndarray]] = None

    def __post_init__(self):
        lum = np.asarray(self.luminance, dtype=np.float64)
        if lum.ndim != 2:
            raise ValueError("luminance must be a 2-D grid")
        object.__setattr__(self, "luminance", lum)
        if self.chroma is not None:
            cb, cr = (np.asarray(c, dtype=np.float64) for c in self.chroma)
            if cb.shape != lum.shape or cr.shape != lum.shape:
                raise DimensionMismatch("chroma channels must match luminance size")
            object.__setattr__(self, "chroma", (cb, cr))

    @property
    def width(self) -> int:
        return self.luminance.shape[1]

    @property
    def height(self) -> int:
        return self.luminance.shape[0]

    def channels(self) -> List[np.ndarray]:
        chans = [self.luminance]
        if self.chroma is not None:
            chans.extend(self.chroma)
        return chans

    @classmethod
    def from_array(cls, pixels) -> "Frame":
        """Build a frame from an 8-bit or [0, 1] grayscale or RGB array."""
        a = np.asarray(pixels)
        scale = 255.0 if a.dtype == np.uint8 else 1.0
        a = a.astype(np.float64) / scale
        if a.ndim == 2:
            return cls(a)
        if a.ndim == 3 and a.shape[2] >= 3:
            rgb = a[..., :3]
            y = rgb @ _LUMA
            cb = 0.564 * (rgb[..., 2] - y)
            cr = 0.713 * (rgb[..., 0] - y)
            return cls(y, (cb, cr))
        raise ValueError(f"unsupported pixel array shape {a.shape}")


def _check_size(f: Frame):
    if f.width < MIN_SIZE or f.height < MIN_SIZE:
        raise FrameTooSmall(f"frame {f.width}x{f.height} is below {MIN_SIZE}x{MIN_SIZE}")


def _raw(values) -> SaliencyMap:
    return SaliencyMap(np.maximum(values, 0.0), NormState.RAW)


def spectral_residual(f: Frame) -> SaliencyMap:
    """Spectral residual saliency on the luminance channel.

    The luminance is downscaled so its longer side is 64 px, the log amplitude
    spectrum minus its 3x3 local average is recombined with the original phase,
    and the squared inverse transform is smoothed and resized back.
    """
    _check_size(f)
    cfg = PREDICTOR_CONFIG["spectral_residual"]
    scale = cfg["working_size"] / max(f.width, f.height)
    w = max(1, int(round(f.width * scale)))
    h = max(1, int(round(f.height * scale)))
    lum = bilinear_resize_array(f.luminance, w, h)

    spectrum = np.fft.fft2(lum)
    amplitude = np.abs(spectrum)
    peak = amplitude.max()
    if peak <= 0:
        return SaliencyMap.zeros(f.width, f.height)
    log_amp = np.log(np.maximum(amplitude, peak * 1e-12))
    residual = log_amp - ndimage.uniform_filter(log_amp, size=cfg["avg_kernel"], mode="wrap")
    # unit phasor; frequencies with no energy carry no phase, and the DC term is
    # dropped so a flat frame yields an empty map
    phasor = np.divide(spectrum, amplitude, out=np.zeros_like(spectrum), where=amplitude > 0)
    phasor[0, 0] = 0.0
    recon = np.fft.ifft2(np.exp(residual) * phasor)
    sal = ndimage.gaussian_filter(np.abs(recon) ** 2, cfg["sigma"])
    return _raw(bilinear_resize_array(sal, f.width, f.height))


def center_surround(f: Frame) -> SaliencyMap:
    """Sum of |center blur - surround blur| over three scale pairs and all channels."""
    _check_size(f)
    out = np.zeros((f.height, f.width))
    for chan in f.channels():
        c = chan - chan.mean()
        for sc, ss in PREDICTOR_CONFIG["center_surround"]["scale_pairs"]:
            out += np.abs(ndimage.gaussian_filter(c, sc) - ndimage.gaussian_filter(c, ss))
    return _raw(out)


def global_contrast(f: Frame, sigma: Optional[float] = None) -> SaliencyMap:
    """|luminance - mean luminance|, Gaussian smoothed (``sigma=0`` skips smoothing)."""
    if sigma is None:
        sigma = PREDICTOR_CONFIG["global_contrast"]["sigma"]
    lum = f.luminance
    raw = np.abs(lum - lum.mean())
    if sigma > 0:
        raw = ndimage.gaussian_filter(raw, sigma)
    return _raw(raw)


def frequency_tuned(f: Frame) -> SaliencyMap:
    # distance of each lightly blurred pixel from the image's mean colour
    sigma = PREDICTOR_CONFIG["frequency_tuned"]["sigma"]
    acc = np.zeros((f.height, f.width))
    for chan in f.channels():
        d = ndimage.gaussian_filter(chan - chan.mean(), sigma)
        acc += d * d
    return _raw(np.sqrt(acc))


def temporal_diff(curr: Frame, prev: Frame) -> SaliencyMap:
    if curr.luminance.shape != prev.luminance.shape:
        raise DimensionMismatch(
            f"frames differ in size: {curr.width}x{curr.height} vs {prev.width}x{prev.height}")
    diff = np.abs(curr.luminance - prev.luminance)
    return _raw(ndimage.gaussian_filter(diff, PREDICTOR_CONFIG["temporal_diff"]["sigma"]))


SPATIAL_REGISTRY: Dict[str, Callable[[Frame], SaliencyMap]] = {
    "spectral_residual": spectral_residual,
    "center_surround": center_surround,
    "global_contrast": global_contrast,
    "frequency_tuned": frequency_tuned,
}


def run_bank(frames: Sequence[Frame], which: Sequence[str]) -> Dict[Tuple[int, str], SaliencyMap]:
    """Run the named predictors on every frame.

    Returns maps keyed by ``(frame_index, predictor_name)``. The temporal
    predictor has no predecessor on frame 0 and yields an all-zero map there.
    ``frames`` may also be a :class:`~vidsal.core.VideoManifest`.
    """
    if not which:
        raise EmptyList("no predictors requested")
    unknown = [n for n in which if n not in PREDICTOR_NAMES]
    if unknown:
        raise ValueError(f"unknown predictor(s): {', '.join(unknown)}")
    if not isinstance(frames, (list, tuple)):
        from .io import load_frames
        frames = load_frames(frames)
    if not frames:
        raise EmptyList("no frames given")
    out: Dict[Tuple[int, str], SaliencyMap] = {}
    for k, frame in enumerate(frames):
        for name in which:
            if name == "temporal_diff":
                m = SaliencyMap.zeros(frame.width, frame.height) if k == 0 else temporal_diff(frame, frames[k - 1])
            else:
                m = SPATIAL_REGISTRY[name](frame)
            if m.shape != frame.luminance.shape:
                m = SaliencyMap(bilinear_resize_array(m.values, frame.width, frame.height))
            out[(k, name)] = m
    return out


def bank_by_predictor(bank: Mapping[Tuple[int, str], SaliencyMap], which: Sequence[str]) -> Dict[str, List[SaliencyMap]]:
    """Regroup a bank into ``{name: [map per frame]}``."""
    n = 1 + max(k for k, _ in bank)
    return {name: [bank[(k, name)] for k in range(n)] for name in which}
