"""Gamma factors, K-Bessel functions of imaginary order and Stirling bounds."""

import math

import mpmath
import numpy as np
from scipy.special import kv, loggamma

from . import kernels
from .errors import DomainError, PoleError

LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2.0 * math.pi)
UNDERFLOW_LOG = -700.0
EXTENDED_DPS = 32


def _check_poles(s, step):
    s = np.asarray(s, dtype=complex)
    near = (np.abs(s.imag) < 1e-14) & (s.real < 0.5)
    if np.any(near):
        r = s.real[near]
        k = np.round(r / step)
        if np.any((np.abs(r - step * k) < 1e-14) & (k <= 0)):
            raise PoleError(f"gamma factor has a pole at {s[near]}")
    return s


def log_gamma_r(s):
    """log(pi^{-s/2} Gamma(s/2)), principal branch of log-gamma."""
    s = _check_poles(s, 2.0)
    return -0.5 * s * LOG_PI + loggamma(0.5 * s)


def log_gamma_c(s):
    """log(2 (2 pi)^{-s} Gamma(s))."""
    s = _check_poles(s, 1.0)
    return math.log(2.0) - s * LOG_2PI + loggamma(s)


def gamma_r(s, precision="standard"):
    """Gamma_R(s) = pi^{-s/2} Gamma(s/2)."""
    if precision == "extended":
        _check_poles(s, 2.0)
        with mpmath.workdps(EXTENDED_DPS):
            s = mpmath.mpmathify(s)
            return mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2)
    out = np.exp(log_gamma_r(s))
    return out if np.ndim(out) else complex(out)


def gamma_c(s, precision="standard"):
    """Gamma_C(s) = 2 (2 pi)^{-s} Gamma(s)."""
    if precision == "extended":
        _check_poles(s, 1.0)
        with mpmath.workdps(EXTENDED_DPS):
            s = mpmath.mpmathify(s)
            return 2 * (2 * mpmath.pi) ** (-s) * mpmath.gamma(s)
    out = np.exp(log_gamma_c(s))
    return out if np.ndim(out) else complex(out)


def _kit_scalar(t, x):
    """(K_{it}(x), underflow flag) for real or purely imaginary t."""
    if x <= 0:
        raise DomainError("K-Bessel argument must be positive")
    t = complex(t)
    if t.real == 0.0 and t.imag != 0.0:
        nu = abs(t.imag)
        if nu >= 0.5:
            raise DomainError("imaginary order outside the exceptional range |Im t| < 1/2")
        val = float(kv(nu, x))
        return val, val == 0.0
    if t.imag != 0.0:
        raise DomainError("order parameter must be real or purely imaginary")
    tr = abs(t.real)
    # crude log-envelope to decide underflow before evaluating
    if x > tr:
        s = math.sqrt(x * x - tr * tr)
        env = -s - tr * math.asin(tr / x) + 0.5 * math.log(math.pi / (2 * s + 1e-300))
        if env < UNDERFLOW_LOG:
            return 0.0, True
    val = float(kernels.kscaled(tr, np.array([x]))[0]) * math.exp(-0.5 * math.pi * tr)
    return val, False


def bessel_k_it(t, x, precision="standard"):
    """K_{it}(x) for x > 0; exact 0 beyond the underflow cutoff."""
    if precision == "extended":
        if x <= 0:
            raise DomainError("K-Bessel argument must be positive")
        with mpmath.workdps(EXTENDED_DPS):
            return mpmath.re(mpmath.besselk(1j * mpmath.mpmathify(t), x))
    return _kit_scalar(t, x)[0]


def bessel_k_it_flagged(t, x):
    """(K_{it}(x), underflow) where underflow marks a value set to exact 0."""
    return _kit_scalar(t, x)


def bessel_k_it_array(t, x):
    """Vectorised K_{it}(x) for real t over an array of x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("K-Bessel argument must be positive")
    t = abs(float(t))
    return kernels.kscaled(t, x) * math.exp(-0.5 * math.pi * t)


def stirling_gamma_r_abs(sigma, tau):
    """Explicit main term 2^{1-s/2} pi^{(1-s)/2} (3+|tau|)^{(s-1)/2} e^{-pi|tau|/4}."""
    a = abs(tau)
    return (2.0 ** (1.0 - 0.5 * sigma) * math.pi ** (0.5 * (1.0 - sigma))
            * (3.0 + a) ** (0.5 * (sigma - 1.0)) * math.exp(-0.25 * math.pi * a))


def stirling_check(sigma, tau):
    """Exact |Gamma_R(sigma + i tau)| against the explicit main term.

    ``fitted_constant`` is C in |ratio - 1| = C / (3 + |tau|).
    """
    exact = math.exp(float(log_gamma_r(complex(sigma, tau)).real))
    main = stirling_gamma_r_abs(sigma, tau)
    dev = abs(exact / main - 1.0)
    return {"sigma": sigma, "tau": tau, "exact": exact, "asymptotic": main,
            "rel_dev": dev, "fitted_constant": dev * (3.0 + abs(tau))}
