"""Kernel backend selection.

The compiled extension is used when it was built; otherwise (or when the
environment variable ``AFFINE_FOCAL_PURE`` is set to a non-empty value) the
numpy fallback is used.  Both backends return identical results.
"""

import os

import numpy as np

from . import _kernels_py

if os.environ.get("AFFINE_FOCAL_PURE"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
        BACKEND = "python"


def cauchy1(a, b):
    return _impl.cauchy1(np.ascontiguousarray(a, dtype=float),
                         np.ascontiguousarray(b, dtype=float))


def cauchy2(a, b):
    return _impl.cauchy2(np.ascontiguousarray(a, dtype=float),
                         np.ascontiguousarray(b, dtype=float))


def stencil_apply(values, offsets, weights, periodic=False):
    return _impl.stencil_apply(np.ascontiguousarray(values, dtype=float),
                               np.ascontiguousarray(offsets, dtype=np.int64),
                               np.ascontiguousarray(weights, dtype=float),
                               bool(periodic))


def rk4_tabulated(f_nodes, f_mid, h, y0):
    return _impl.rk4_tabulated(np.ascontiguousarray(f_nodes, dtype=float),
                               np.ascontiguousarray(f_mid, dtype=float),
                               float(h), float(y0))
