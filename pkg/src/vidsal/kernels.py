"""Kernel backend selection.

The compiled Cython module is used when it has been built; otherwise the numpy
implementation is loaded. Setting ``VIDSAL_PURE_PYTHON=1`` forces the fallback.
"""
import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("VIDSAL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def density_accumulate(xs, ys, weights, width, height, sigma_d, backend=None):
    impl = _impl if backend is None else get_backend(backend)
    return impl.density_accumulate(_f64(xs), _f64(ys), _f64(weights), int(width), int(height), float(sigma_d))


def pairwise_intersection(stack, backend=None):
    """Matrix of ``sum(min(stack[i], stack[j]))`` over the flattened rows."""
    impl = _impl if backend is None else get_backend(backend)
    stack = np.asarray(stack, dtype=np.float64)
    return impl.pairwise_intersection(_f64(stack.reshape(stack.shape[0], -1)))


def enumerate_objectives(sim, lambda_d, eps, backend=None):
    """Objective of every non-empty mask; entry ``m - 1`` holds mask ``m``
    (bit ``i`` set means predictor ``i`` is selected)."""
    impl = _impl if backend is None else get_backend(backend)
    return impl.enumerate_objectives(_f64(sim), float(lambda_d), float(eps))


def get_backend(name):
    """Return the kernel module for ``"cython"`` or ``"python"``."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")
