"""Backend selection for the K-Bessel kernels.

The compiled extension ``aqe._kbessel`` is used when it imports; otherwise the
numpy implementation in ``aqe._kbessel_py`` takes over. Setting the
environment variable ``AQE_PURE_PYTHON=1`` forces the fallback.
"""

import math
import os

import numpy as np
from scipy.special import loggamma

from . import _kbessel_py

_compiled = None
if not os.environ.get("AQE_PURE_PYTHON"):
    try:
        from . import _kbessel as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def backend_module(name=None):
    """Kernel module for ``name`` in {"cython", "python"} (default: active)."""
    name = name or BACKEND
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernel extension is not built")
        return _compiled
    if name == "python":
        return _kbessel_py
    raise ValueError(f"unknown backend {name!r}")


def _lg(t):
    lg = loggamma(1.0 + 1j * t)
    return float(lg.real), float(lg.imag)


def kscaled(t, x, backend=None):
    """exp(pi|t|/2) K_{it}(x) for real t, elementwise over x > 0."""
    t = abs(float(t))
    lg_re, lg_im = _lg(t)
    return backend_module(backend).kscaled_array(t, np.asarray(x, dtype=float), lg_re, lg_im)


def decay_cutoff(t, tol=1e-18):
    """Argument beyond which exp(pi t/2) K_{it}(x) < tol (upper estimate)."""
    t = abs(float(t))
    lt = -math.log(tol)
    x = max(t, 1.0)
    while True:
        s = math.sqrt(max(x * x - t * t, 0.0))
        expo = 0.5 * math.pi * t - s - t * math.asin(min(t / x, 1.0))
        if expo + 0.5 * math.log(math.pi / (2.0 * max(s, 1e-3))) < -lt:
            return x
        x += 0.25


def maass_sum(t, coeffs, x, y, odd, tol=1e-18, backend=None):
    """sum_n c_n sqrt(y) K~(2 pi n y) cs(2 pi n x) with cs = sin if odd else cos."""
    t = abs(float(t))
    lg_re, lg_im = _lg(t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast(x, y).shape
    xb, yb = np.broadcast_arrays(x, y)
    out = backend_module(backend).maass_sum(
        t, np.asarray(coeffs, dtype=float), xb.ravel(), yb.ravel(), bool(odd),
        lg_re, lg_im, decay_cutoff(t, tol))
    return out.reshape(shape)
