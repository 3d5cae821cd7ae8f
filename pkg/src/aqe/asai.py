"""Archimedean data for forms over quadratic fields.

Conductors, the piecewise-linear decay exponents Omega, exact gamma ratios
against their Stirling main terms, and covolumes of Hilbert modular surfaces.
No Hilbert or Bianchi forms are computed here; the spectral parameters are
plain inputs.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma

from .errors import DomainError, NotFundamentalError
from . import lfun
from .specfun import log_gamma_c, log_gamma_r

# narrow class number one (real) and class number one (imaginary) discriminants
REAL_PRESETS = (5, 8, 13, 17, 29, 37, 41, 53, 61, 73, 89, 97)
IMAG_PRESETS = (-3, -4, -7, -8, -11, -19, -43, -67, -163)
SWEEP_COLUMNS = ("tk", "t1", "t2", "exact", "asymptotic", "rel_dev", "omega")
MAX_PARAM = 100.0


def _real(v, name):
    if isinstance(v, complex) or np.iscomplexobj(v):
        if complex(v).imag != 0:
            raise DomainError(f"{name} must be real (real-spectrum scope)")
        v = complex(v).real
    v = float(v)
    if not math.isfinite(v):
        raise DomainError(f"{name} must be finite")
    return v


@dataclass(frozen=True)
class HilbertSpectralData:
    t1: float
    t2: float

    def __post_init__(self):
        object.__setattr__(self, "t1", _real(self.t1, "t1"))
        object.__setattr__(self, "t2", _real(self.t2, "t2"))


@dataclass(frozen=True)
class QuadraticFieldData:
    D: int

    def __post_init__(self):
        D = int(self.D)
        if D in (0, 1) or not lfun._is_fundamental(D):
            raise NotFundamentalError(f"{D} is not a fundamental discriminant")
        object.__setattr__(self, "D", D)

    @property
    def real(self):
        return self.D > 0

    @property
    def preset(self):
        return self.D in (REAL_PRESETS if self.real else IMAG_PRESETS)

    @property
    def chi(self):
        return lfun.dirichlet_l(self.D)


def asai_conductor(data):
    """(3 + |t1 + t2|)^2 (3 + |t1 - t2|)^2."""
    return (3.0 + abs(data.t1 + data.t2)) ** 2 * (3.0 + abs(data.t1 - data.t2)) ** 2


def omega_real(t, t1, t2):
    """Decay exponent of the real-quadratic gamma ratio (four branches)."""
    a, b1, b2 = abs(t), abs(t1), abs(t2)
    hi, lo = max(b1, b2), min(b1, b2)
    if a >= hi + lo:
        return max(a - hi - lo, 0.0)
    if a <= hi - lo:
        return max(hi - lo - a, 0.0)
    return 0.0


def omega_imag(t, tphi):
    """0 for |t| <= 2|tphi|, |t| - 2|tphi| beyond."""
    return max(abs(t) - 2.0 * abs(tphi), 0.0)


def _lgr(s):
    return float(np.real(log_gamma_r(complex(s))))


def _lgc(s):
    return float(np.real(log_gamma_c(complex(s))))


def _check_range(*vals):
    for v in vals:
        if abs(v) > MAX_PARAM:
            raise DomainError(f"parameter {v} outside |t| <= {MAX_PARAM:g}")


def gamma_ratio_real(tk, data):
    """(exact, asymptotic) for the real-quadratic ratio of gamma factors."""
    t1, t2, tk = data.t1, data.t2, _real(tk, "tk")
    _check_range(t1, t2, tk)
    num = sum(_lgr(complex(0.5, e1 * t1 + e2 * t2 + e3 * tk))
              for e1 in (1, -1) for e2 in (1, -1) for e3 in (1, -1))
    den = 2 * _lgr(1.0) + sum(_lgr(complex(1.0, e * 2.0 * t)) for e in (1, -1) for t in (t1, t2, tk))
    exact = math.exp(num - den)
    asym = 8.0 * math.pi * math.exp(-math.pi * omega_real(tk, t1, t2))
    for e1 in (1, -1):
        for e2 in (1, -1):
            asym *= (3.0 + abs(t1 + e1 * t2 + e2 * tk)) ** -0.5
    return exact, asym


def error_envelope_real(tk, data):
    """Sum of reciprocals bounding the relative error of the main term."""
    t1, t2 = data.t1, data.t2
    e = 1 / (3 + abs(t1)) + 1 / (3 + abs(t2)) + 1 / (3 + abs(tk))
    e += sum(1 / (3 + abs(t1 + a * t2 + b * tk)) for a in (1, -1) for b in (1, -1))
    return e


def gamma_ratio_imag(tk, tphi):
    """(exact, asymptotic) for the imaginary-quadratic ratio of gamma factors."""
    tk, tphi = _real(tk, "tk"), _real(tphi, "tphi")
    _check_range(tk, tphi)
    num = sum(_lgr(complex(0.5, e1 * 2.0 * tphi + e2 * tk)) for e1 in (1, -1) for e2 in (1, -1))
    num += sum(_lgc(complex(0.5, e * tk)) for e in (1, -1))
    den = _lgc(1.0) + sum(_lgc(complex(1.0, e * 2.0 * tphi)) + _lgr(complex(1.0, e * 2.0 * tk))
                          for e in (1, -1))
    exact = math.exp(num - den)
    asym = (4.0 * math.pi ** 2 * math.exp(-math.pi * omega_imag(tk, tphi)) / (3.0 + abs(tphi))
            * (3.0 + abs(2 * tphi + tk)) ** -0.5 * (3.0 + abs(2 * tphi - tk)) ** -0.5)
    return exact, asym


def bianchi_conductor(tphi):
    """C(phi) = (3 + |tphi|)^4."""
    return (3.0 + abs(tphi)) ** 4


def bs_mass_factor(tphi):
    """(exact, asymptotic, C(phi)) for the square-root gamma ratio of the mass bound."""
    tphi = _real(tphi, "tphi")
    _check_range(tphi)
    num = _lgr(2.0) + sum(_lgr(complex(2.0, e * 2.0 * tphi)) for e in (1, -1))
    den = _lgr(1.0) + sum(_lgr(complex(1.0, e * 2.0 * tphi)) for e in (1, -1))
    exact = math.exp(0.5 * (num - den))
    asym = (3.0 + abs(tphi)) ** -0.5 / (math.sqrt(2.0) * math.pi)
    return exact, asym, bianchi_conductor(tphi)


def covolume(field):
    """vol(SL2(O_E)\\H x H) = 2 sqrt(D) xi_E(2) = 2 sqrt(D) D Gamma_R(2)^2 zeta(2) L(2, chi_D)."""
    if not isinstance(field, QuadraticFieldData):
        field = QuadraticFieldData(field)
    D = field.D
    if D <= 0:
        raise DomainError("covolume is defined here for real quadratic fields")
    L2 = lfun.afe_value(field.chi, 2.0).real
    return 2.0 * math.sqrt(D) * D * math.pi ** -2 * (math.pi ** 2 / 6.0) * L2


def asai_rs_conductor(tk, data):
    """Analytic conductor of the Asai x GL2 product at the archimedean place.

    ``data`` is a HilbertSpectralData (real quadratic, degree 8 assembled from
    pairwise sums of parameters) or a real tphi (imaginary quadratic shape).
    """
    tk = _real(tk, "tk")
    if isinstance(data, HilbertSpectralData):
        asai = (data.t1 + data.t2, -(data.t1 + data.t2), data.t1 - data.t2, -(data.t1 - data.t2))
        mus = [complex(0.0, a + e * tk) for a in asai for e in (1, -1)]
        stub = lfun.LFunctionData(8, 1, tuple(mus), 0, np.ones(1, dtype=complex))
        return lfun.analytic_conductor(stub)
    tphi = _real(data, "tphi")
    return (3.0 + abs(tk)) ** 4 * (3.0 + abs(2 * tphi + tk)) ** 2 * (3.0 + abs(2 * tphi - tk)) ** 2


def sweep_imag(tphi, tks):
    """Rows (tk, t1, t2, exact, asymptotic, rel_dev, omega) for the imaginary case."""
    rows = []
    for tk in tks:
        ex, asym = gamma_ratio_imag(tk, tphi)
        rows.append((float(tk), float(tphi), float("nan"), ex, asym, abs(ex / asym - 1.0), omega_imag(tk, tphi)))
    return rows


def sweep_real(data, tks):
    rows = []
    for tk in tks:
        ex, asym = gamma_ratio_real(tk, data)
        rows.append((float(tk), data.t1, data.t2, ex, asym, abs(ex / asym - 1.0),
                     omega_real(tk, data.t1, data.t2)))
    return rows


def write_sweep(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for row in rows:
            w.writerow([f"{v:.15g}" for v in row])
