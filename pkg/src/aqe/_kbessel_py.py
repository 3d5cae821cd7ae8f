"""Pure numpy implementation of the K-Bessel kernels.

Used when the compiled extension is unavailable. The algorithms mirror
``_kbessel.pyx`` exactly so both backends agree to rounding.

All values are scaled: ``kscaled(t, x) = exp(pi*t/2) * K_{it}(x)`` for real
``t >= 0`` and ``x > 0``. The scaling keeps the oscillatory region of order
one for every ``t`` in the supported range.
"""

import math

import numpy as np

SERIES_MARGIN = 9.0
TAIL_EXPONENT = 45.0
CHUNK = 4096


def _series(t, x, lg_re, lg_im):
    # K = -pi/sinh(pi t) * Im I_{it}(x), power series of I_{it}
    z = 0.25 * x * x
    term = np.ones(x.shape, dtype=complex)
    total = term.copy()
    peak = np.ones(x.shape)
    k = 0
    zmax = float(z.max()) if z.size else 0.0
    while True:
        k += 1
        term = term * z / (k * (k + 1j * t))
        total += term
        mag = np.abs(term)
        np.maximum(peak, mag, out=peak)
        if k > zmax and np.all(mag < 1e-17 * peak):
            break
    log_sinh = math.pi * t + math.log1p(-math.exp(-2.0 * math.pi * t)) - math.log(2.0)
    lpre = math.log(math.pi) - log_sinh + 0.5 * math.pi * t - lg_re
    phase = t * np.log(0.5 * x) - lg_im
    w = np.exp(lpre) * (np.cos(phase) + 1j * np.sin(phase)) * total
    return -w.imag


def _contour(t, x):
    # trapezoid rule for (1/2) int exp(-x cosh(w) + i t w) dw on Im w = alpha
    alpha = np.where(x > t, np.arcsin(np.minimum(t / x, 1.0)), 0.0)
    ca = np.cos(alpha)
    sa = np.sin(alpha)
    xc = x * ca
    vmax = np.arccosh(1.0 + TAIL_EXPONENT / xc)
    chv = np.cosh(vmax)
    omega = t * (chv - 1.0) + np.abs(x * sa - t) * chv
    h = np.minimum(np.minimum(0.25, 0.6 / np.sqrt(xc)), 1.2 / (omega + 1e-300))
    nodes = np.ceil(vmax / h).astype(int) + 1
    out = np.empty(x.shape)
    # group by node count to keep the work matrix rectangular
    order = np.argsort(nodes)
    start = 0
    while start < order.size:
        stop = min(start + 256, order.size)
        idx = order[start:stop]
        n = int(nodes[idx].max())
        v = np.arange(n + 1)[None, :] * h[idx, None]
        re = -xc[idx, None] * np.cosh(v) + (0.5 * math.pi - alpha[idx, None]) * t
        im = -x[idx, None] * sa[idx, None] * np.sinh(v) + t * v
        f = np.exp(re) * np.cos(im)
        out[idx] = h[idx] * (f.sum(axis=1) - 0.5 * f[:, 0])
        start = stop
    return out


def kscaled_array(t, x, lg_re, lg_im):
    """exp(pi t/2) K_{it}(x) on an array of x > 0 (t > 0 fixed)."""
    x = np.ascontiguousarray(x, dtype=float)
    out = np.empty(x.shape)
    flat = x.ravel()
    res = out.ravel()
    for lo in range(0, flat.size, CHUNK):
        xs = flat[lo:lo + CHUNK]
        r = np.empty(xs.shape)
        ser = (t >= 0.01) & (xs * xs <= t * t + SERIES_MARGIN)
        if ser.any():
            r[ser] = _series(t, xs[ser], lg_re, lg_im)
        if (~ser).any():
            r[~ser] = _contour(t, xs[~ser])
        res[lo:lo + CHUNK] = r
    return out


def maass_sum(t, coeffs, x, y, odd, lg_re, lg_im, xcut):
    """sum_n c_n sqrt(y) K~(2 pi n y) cs(2 pi n x), truncated at 2 pi n y > xcut."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    coeffs = np.asarray(coeffs, dtype=float)
    out = np.zeros(x.shape)
    if x.size == 0:
        return out
    order = np.argsort(y)
    lo = 0
    while lo < order.size:
        ymin = y[order[lo]]
        width = max(1, 200000 // (int(xcut / (2.0 * math.pi * ymin)) + 1))
        # ascending y: the first point of a chunk needs the most terms
        hi = min(order.size, lo + width)
        idx = order[lo:hi]
        ys = y[idx]
        nmax = min(coeffs.size, int(xcut / (2.0 * math.pi * ys.min())) + 1)
        n = np.arange(1, nmax + 1)
        arg = 2.0 * math.pi * np.outer(ys, n)
        keep = arg <= xcut
        kv = np.zeros(arg.shape)
        kv[keep] = kscaled_array(t, arg[keep], lg_re, lg_im)
        ang = 2.0 * math.pi * np.outer(x[idx], n)
        trig = np.sin(ang) if odd else np.cos(ang)
        out[idx] = np.sqrt(ys) * ((kv * trig) @ coeffs[:nmax])
        lo = hi
    return out
