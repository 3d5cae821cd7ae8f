# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled K-Bessel kernels (scaled K_{it}) and Fourier sums.

Same algorithms as the numpy fallback in ``_kbessel_py.py``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, cos, sin, log, sqrt, fabs, cosh, sinh, acosh, asin, ceil, log1p, M_PI

cnp.import_array()

cdef double SERIES_MARGIN = 9.0
cdef double TAIL_EXPONENT = 45.0


cdef double _series(double t, double x, double lpre, double lg_im) nogil:
    cdef double z = 0.25 * x * x
    cdef double tr = 1.0, ti = 0.0, sr = 1.0, si = 0.0
    cdef double dr, di, den, nr, ni, mag, peak = 1.0, phase, c, s
    cdef int k = 0
    while True:
        k += 1
        # term *= z / (k * (k + i t))
        dr = k * k
        di = k * t
        den = dr * dr + di * di
        nr = (tr * dr + ti * di) / den * z
        ni = (ti * dr - tr * di) / den * z
        tr = nr
        ti = ni
        sr += tr
        si += ti
        mag = sqrt(tr * tr + ti * ti)
        if mag > peak:
            peak = mag
        if k > z and mag < 1e-17 * peak:
            break
    phase = t * log(0.5 * x) - lg_im
    c = cos(phase)
    s = sin(phase)
    return -exp(lpre) * (s * sr + c * si)


cdef double _contour(double t, double x) nogil:
    cdef double alpha = 0.0
    if x > t:
        alpha = asin(t / x)
    cdef double ca = cos(alpha), sa = sin(alpha)
    cdef double xc = x * ca
    cdef double vmax = acosh(1.0 + TAIL_EXPONENT / xc)
    cdef double chv = cosh(vmax)
    cdef double omega = t * (chv - 1.0) + fabs(x * sa - t) * chv
    cdef double h = 0.25
    if 0.6 / sqrt(xc) < h:
        h = 0.6 / sqrt(xc)
    if 1.2 / (omega + 1e-300) < h:
        h = 1.2 / (omega + 1e-300)
    cdef int n = <int>ceil(vmax / h) + 1
    cdef double shift = (0.5 * M_PI - alpha) * t
    cdef double total = 0.5 * exp(-xc + shift), f
    # cosh(jh), sinh(jh) by the addition formulas
    cdef double ch = cosh(h), sh = sinh(h), cj = 1.0, sj = 0.0, tmp
    cdef int j
    for j in range(1, n + 1):
        tmp = cj * ch + sj * sh
        sj = sj * ch + cj * sh
        cj = tmp
        f = exp(-xc * cj + shift) * cos(-x * sa * sj + t * j * h)
        total += f
    return h * total


cdef inline double _kscaled(double t, double x, double lpre, double lg_im) nogil:
    if t >= 0.01 and x * x <= t * t + SERIES_MARGIN:
        return _series(t, x, lpre, lg_im)
    return _contour(t, x)


cdef double _lpre(double t, double lg_re):
    cdef double log_sinh = M_PI * t + log1p(-exp(-2.0 * M_PI * t)) - log(2.0)
    return log(M_PI) - log_sinh + 0.5 * M_PI * t - lg_re


def kscaled_array(double t, x, double lg_re, double lg_im):
    """exp(pi t/2) K_{it}(x) on an array of x > 0 (t > 0 fixed)."""
    cdef cnp.ndarray[double, ndim=1] xf = np.ascontiguousarray(x, dtype=float).ravel()
    cdef cnp.ndarray[double, ndim=1] out = np.empty(xf.shape[0])
    cdef double lpre = _lpre(t, lg_re) if t >= 0.01 else 0.0
    cdef Py_ssize_t i, m = xf.shape[0]
    with nogil:
        for i in range(m):
            out[i] = _kscaled(t, xf[i], lpre, lg_im)
    return out.reshape(np.shape(x))


def maass_sum(double t, coeffs, x, y, bint odd, double lg_re, double lg_im, double xcut):
    """sum_n c_n sqrt(y) K~(2 pi n y) cs(2 pi n x), truncated at 2 pi n y > xcut."""
    cdef cnp.ndarray[double, ndim=1] c = np.ascontiguousarray(coeffs, dtype=float)
    cdef cnp.ndarray[double, ndim=1] xf = np.ascontiguousarray(x, dtype=float).ravel()
    cdef cnp.ndarray[double, ndim=1] yf = np.ascontiguousarray(y, dtype=float).ravel()
    cdef cnp.ndarray[double, ndim=1] out = np.zeros(xf.shape[0])
    cdef double lpre = _lpre(t, lg_re) if t >= 0.01 else 0.0
    cdef Py_ssize_t i, n, m = xf.shape[0], nc = c.shape[0]
    cdef double acc, arg, ang
    with nogil:
        for i in range(m):
            acc = 0.0
            for n in range(1, nc + 1):
                arg = 2.0 * M_PI * n * yf[i]
                if arg > xcut:
                    break
                ang = 2.0 * M_PI * n * xf[i]
                if odd:
                    acc += c[n - 1] * _kscaled(t, arg, lpre, lg_im) * sin(ang)
                else:
                    acc += c[n - 1] * _kscaled(t, arg, lpre, lg_im) * cos(ang)
            out[i] = sqrt(yf[i]) * acc
    return out
