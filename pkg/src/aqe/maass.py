"""Level-1 Hecke-Maass cusp forms and the real-analytic Eisenstein series.

A form is stored through its Hecke eigenvalues lambda(n) (lambda(1) = 1) and
the normalising constant rho, so that

    phi(x+iy) = rho sqrt(y) sum_n lambda(n) K_{it}(2 pi n y) cs(2 pi n x)

with cs = cos for even and sin for odd forms, and int |phi|^2 dmu = 1.

Eigenvalues are located by implicit-automorphy collocation: the expansion is
sampled on a horocycle of height Y below the fundamental domain, the samples
are pulled back into the domain, and the discrete Fourier inversion of the
pulled-back expansion must reproduce the coefficients. With lambda(1) = 1 the
n = 1 equation is left out of the solve and its residual is the secular
function whose zeros are the eigenvalues.
"""

import json
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import mpmath
import numpy as np
from scipy.fft import dct, dst
from scipy.optimize import brentq
from scipy.special import kv

from . import kernels
from .errors import (IllConditionedError, IncompleteCatalogError, NoConvergenceError,
                     PoleError, TruncationError)
from .hypgeom import SQRT3_2, build_grid, reduce_points
from .specfun import log_gamma_r

SOLVER_VERSION = "aqe-hejhal-1"
SCAN_STEP = 0.05
CERT_TOL = 1e-8
SCAN_START = 1.0
DEFAULT_EXTENSION = 400


@dataclass(frozen=True)
class MaassForm:
    t: float
    parity: str
    coeffs: np.ndarray
    truncation: int
    secular_residual: float
    rho: float
    solver_version: str = SOLVER_VERSION
    raw_coeffs: np.ndarray | None = field(default=None, compare=False, repr=False)

    @property
    def odd(self):
        return self.parity == "odd"

    @property
    def W(self):
        return -1 if self.odd else 1

    @property
    def eigenvalue(self):
        return 0.25 + self.t * self.t

    @property
    def form_id(self):
        return f"t{self.t:.2f}"

    def to_json(self):
        return json.dumps({
            "t": float(self.t),
            "parity": self.parity,
            "coeffs": [float(c) for c in self.coeffs],
            "truncation": int(self.truncation),
            "secular_residual": float(self.secular_residual),
            "rho": float(self.rho),
            "solver_version": self.solver_version,
        })

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(d["t"], d["parity"], np.array(d["coeffs"], dtype=float), d["truncation"],
                   d["secular_residual"], d["rho"], d["solver_version"])


# ---------------------------------------------------------------- collocation

def _cs(odd):
    return np.sin if odd else np.cos


def _system(t, odd, M, Q, Y):
    """Row-normalised collocation matrix A with A c = 0 for eigen-data."""
    m = np.arange(1, Q + 1)
    xm = (m - 0.5) / (2.0 * Q)
    xs, ys = reduce_points(xm, np.full(Q, Y))
    n = np.arange(1, M + 1)
    cs = _cs(odd)
    ks = kernels.kscaled(t, 2.0 * math.pi * np.outer(ys, n))
    pulled = np.sqrt(ys)[:, None] * ks * cs(2.0 * math.pi * np.outer(xs, n))
    inv = cs(2.0 * math.pi * np.outer(n, xm)) * (2.0 / Q)
    diag = math.sqrt(Y) * kernels.kscaled(t, 2.0 * math.pi * n * Y)
    return (np.diag(diag) - inv @ pulled) / diag[:, None]


class _Collocation:
    """Secular function for one (parity, truncation, height) configuration."""

    def __init__(self, odd, M, Y):
        self.odd = odd
        self.M = M
        self.Q = M + 12
        self.Y = Y

    def solve(self, t):
        A = _system(t, self.odd, self.M, self.Q, self.Y)
        try:
            c = np.linalg.solve(A[1:, 1:], -A[1:, 0])
        except np.linalg.LinAlgError:
            # exactly singular: a pole of the secular function
            c = np.linalg.lstsq(A[1:, 1:], -A[1:, 0], rcond=None)[0]
        c = np.concatenate([[1.0], c])
        return float(A[0] @ c), c

    def __call__(self, t):
        return self.solve(t)[0]


def _heights(b, M):
    y1 = min(0.7 * SQRT3_2, (b + 20.0) / (2.0 * math.pi * M))
    return y1, 0.85 * y1


def required_truncation(b):
    return int(math.ceil(10 + 2 * b))


def _scan(f, a, b, step=SCAN_STEP, depth=2):
    """Sign-change brackets of f on [a, b].

    Local minima of |f| without a sign change are rescanned with a five times
    finer step: a zero next to a pole, or two close zeros, hide inside a
    single coarse step.
    """
    n = max(1, int(math.ceil((b - a) / step - 1e-9)))
    grid = np.linspace(a, b, n + 1)
    vals = np.array([f(t) for t in grid])
    out = []
    for i in range(n):
        if np.sign(vals[i]) * np.sign(vals[i + 1]) < 0:
            out.append((grid[i], grid[i + 1]))
    if depth > 0:
        mag = np.abs(vals)
        for i in range(1, n):
            if mag[i] < mag[i - 1] and mag[i] < mag[i + 1]:
                lo, hi = grid[i - 1], grid[i + 1]
                for br in _scan(f, lo, hi, step / 5.0, depth - 1):
                    if not any(p <= br[0] and br[1] <= q for p, q in out):
                        out.append(br)
    return sorted(out)


def _root(f, lo, hi):
    try:
        return brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
    except (RuntimeError, ValueError) as exc:
        raise NoConvergenceError(f"bisection failed on [{lo}, {hi}]: {exc}") from exc


def _certify(f2, r):
    # shrink the bracket so that a nearby pole of f2 cannot mask its zero
    for width in (0.02, 4e-3, 5e-4, 5e-5):
        lo, hi = r - width, r + width
        if np.sign(f2(lo)) * np.sign(f2(hi)) < 0:
            r2 = _root(f2, lo, hi)
            if abs(r2 - r) <= CERT_TOL:
                return r2
    return None


def locate_eigenvalues(window, parity, truncation=None):
    """Certified spectral parameters in ``window`` (no coefficient extension).

    Returns a list of (t, coefficients from the first height, secular residual).
    """
    a, b = (float(v) for v in window)
    if b <= a:
        raise ValueError("window must have positive width")
    if b - a > 2.0 + 1e-12:
        # wide windows are covered by consecutive sub-windows of width <= 2
        edges = list(np.arange(a, b, 2.0)) + [b]
        out = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi - lo > 1e-9:
                out.extend(locate_eigenvalues((lo, hi), parity, truncation))
        return out
    need = required_truncation(b)
    M = need if truncation is None else int(truncation)
    if M < need:
        raise IllConditionedError(f"truncation {M} below the required {need} for window ending at {b}")
    odd = parity == "odd"
    y1, y2 = _heights(b, M)
    f1 = _Collocation(odd, M, y1)
    f2 = _Collocation(odd, M, y2)
    roots = []
    for f, g in ((f1, f2), (f2, f1)):
        for lo, hi in _scan(f, a, b):
            r = _root(f, lo, hi)
            if any(abs(r - q) < 1e-6 for q, _, _ in roots):
                continue
            r2 = _certify(g, r)
            if r2 is None or abs(r - r2) > CERT_TOL:
                continue  # pole of the secular function, not an eigenvalue
            _, c1 = f1.solve(r)
            _, c2 = f2.solve(r)
            k = min(10, M // 2)
            resid = float(np.max(np.abs(c1[:k] - c2[:k])))
            if resid > 1e-6:
                continue
            roots.append((r, c1, max(resid, abs(r - r2))))
    roots.sort(key=lambda item: item[0])
    return [item for item in roots if a <= item[0] <= b]


def solve_form(window, parity, truncation=None, extend_to=DEFAULT_EXTENSION):
    """All even or odd level-1 forms with spectral parameter in ``window``."""
    forms = []
    for t, c, resid in locate_eigenvalues(window, parity, truncation):
        M = len(c)
        raw = extend_raw_coefficients(t, parity == "odd", c, max(extend_to, M))
        lam = enforce_multiplicativity(raw)
        rho = normalization(t, parity == "odd", lam)
        forms.append(MaassForm(float(t), parity, lam, M, float(resid), rho, SOLVER_VERSION, raw))
    return forms


# ---------------------------------------------------------- coefficient data

def extend_raw_coefficients(t, odd, c, N):
    """lambda(1..N) read off from horocycle samples at small heights.

    The expansion with the collocation coefficients ``c`` is evaluated at
    reduced points (where it converges fast), sampled along horocycles with
    2 pi N Y ~ t, and Fourier-inverted by a DCT/DST. Each coefficient is
    taken from the height where its K-Bessel factor is largest.
    """
    xcut = kernels.decay_cutoff(t, 1e-17)
    best = np.zeros(N)
    scale = np.zeros(N)
    n = np.arange(1, N + 1)
    base = max(t, 1.0) / (2.0 * math.pi * N)
    for Y in (base, 0.93 * base, 0.81 * base):
        Q = int(math.ceil(0.5 * (N + xcut / (2.0 * math.pi * Y)))) + 16
        m = np.arange(Q)
        xm = (m + 0.5) / (2.0 * Q)
        xs, ys = reduce_points(xm, np.full(Q, Y))
        f = kernels.maass_sum(t, c, xs, ys, odd)
        if odd:
            b = dst(f, type=2)[:N] / Q
        else:
            b = dct(f, type=2)[1:N + 1] / Q
        k = math.sqrt(Y) * kernels.kscaled(t, 2.0 * math.pi * n * Y)
        take = np.abs(k) > scale
        best[take] = b[take] / k[take]
        scale[take] = np.abs(k[take])
    return best / best[0]


def _spf(N):
    spf = np.zeros(N + 1, dtype=np.int64)
    for p in range(2, N + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    return spf


def primes_upto(N):
    spf = _spf(N)
    return np.array([p for p in range(2, N + 1) if spf[p] == p], dtype=np.int64)


def enforce_multiplicativity(raw):
    """Hecke-multiplicative lambda(n) generated from the raw prime values."""
    N = len(raw)
    lam = np.zeros(N + 1)
    lam[1] = 1.0
    spf = _spf(N)
    for n in range(2, N + 1):
        p = spf[n]
        m, k = n, 0
        while m % p == 0:
            m //= p
            k += 1
        if m > 1:
            lam[n] = lam[m] * lam[n // m]
        elif k == 1:
            lam[n] = raw[p - 1]
        else:
            # lambda(p^k) = lambda(p) lambda(p^{k-1}) - lambda(p^{k-2})
            lam[n] = lam[p] * lam[n // p] - lam[n // (p * p)]
    return lam[1:]


def hecke_residual(coeffs, limit=None):
    """max |lambda(m) lambda(n) - lambda(mn)| over coprime m, n <= limit."""
    N = len(coeffs)
    limit = int(math.isqrt(N)) if limit is None else limit
    worst = 0.0
    for m in range(2, limit + 1):
        for n in range(m + 1, limit + 1):
            if math.gcd(m, n) == 1 and m * n <= N:
                worst = max(worst, abs(coeffs[m - 1] * coeffs[n - 1] - coeffs[m * n - 1]))
    return worst


def hecke_eigenvalues(form, n_max):
    """lambda(1..n_max) of ``form`` (multiplicatively consistent)."""
    if n_max > len(form.coeffs):
        raise TruncationError(f"only {len(form.coeffs)} coefficients are reliable")
    return np.array(form.coeffs[:n_max])


def extend_form(form, N):
    """Same form carrying at least N Hecke eigenvalues."""
    if len(form.coeffs) >= N:
        return form
    raw = extend_raw_coefficients(form.t, form.odd, form.coeffs[:form.truncation], N)
    lam = enforce_multiplicativity(raw)
    return replace(form, coeffs=lam, raw_coeffs=raw)


# --------------------------------------------------------------- evaluation

def _psi(t, odd, coeffs, x, y):
    """Unnormalised expansion sum_n lambda(n) sqrt(y) K~(2 pi n y) cs(2 pi n x)."""
    return kernels.maass_sum(t, coeffs, x, y, odd)


def normalization(t, odd, coeffs, cusp_height=3.0, nx=48, ny=48):
    """rho such that the form has unit L2 norm on SL2(Z)\\H."""
    g = build_grid(cusp_height, nx, ny)
    body = g.integrate(_psi(t, odd, coeffs, g.x, g.y) ** 2)
    tail = parseval_tail(t, coeffs, cusp_height)
    return math.exp(0.5 * math.pi * t) / math.sqrt(body + tail)


def parseval_tail(t, coeffs, T, scale=1.0):
    """(1/2) sum_n lambda(n)^2 int_T^inf K~(2 pi n y)^2 dy/y (times scale)."""
    xcut = kernels.decay_cutoff(t, 1e-20)
    nmax = min(len(coeffs), int(xcut / (2.0 * math.pi * T)) + 1)
    g, w = np.polynomial.legendre.leggauss(80)
    total = 0.0
    for n in range(1, nmax + 1):
        lo, hi = math.log(T), math.log(max(xcut / (2.0 * math.pi * n), T * 1.0001))
        if hi <= lo:
            break
        u = lo + 0.5 * (hi - lo) * (g + 1.0)
        k = kernels.kscaled(t, 2.0 * math.pi * n * np.exp(u))
        total += coeffs[n - 1] ** 2 * 0.5 * (hi - lo) * np.sum(w * k * k)
    return 0.5 * total * scale


def evaluate(form, z):
    """phi(z) at arbitrary points of H (reduced internally)."""
    z = np.asarray(z, dtype=complex)
    xs, ys = reduce_points(z.real.ravel(), z.imag.ravel())
    vals = _psi(form.t, form.odd, form.coeffs, xs, ys)
    out = form.rho * math.exp(-0.5 * math.pi * form.t) * vals
    return out.reshape(z.shape) if z.ndim else float(out[0])


# ---------------------------------------------------------- cache handling

def cache_dir(default=None):
    env = os.environ.get("AQE_CACHE_DIR")
    path = Path(env or default or Path.home() / ".cache" / "aqe")
    path.mkdir(parents=True, exist_ok=True)
    return path


def save_form(form, directory):
    path = Path(directory) / f"{form.form_id}.json"
    path.write_text(form.to_json())
    return path


def load_form(form_id, directory):
    path = Path(directory) / f"{form_id}.json"
    if not path.exists():
        raise FileNotFoundError(path)
    return MaassForm.from_json(path.read_text())


# --------------------------------------------------------- Eisenstein series

def xi(s):
    """Completed zeta pi^{-s/2} Gamma(s/2) zeta(s)."""
    return complex(np.exp(log_gamma_r(s))) * complex(mpmath.zeta(s))


def scattering(s):
    """phi(s) = xi(2s-1)/xi(2s), the constant-term coefficient of y^{1-s}."""
    return xi(2 * s - 1) / xi(2 * s)


def _divisor_power(n, a):
    return sum(d ** a for d in range(1, n + 1) if n % d == 0)


def _k_order(nu, x):
    """K_nu(x) for the orders arising from E(z, s)."""
    nu = complex(nu)
    if abs(nu.imag) < 1e-15:
        return kv(abs(nu.real), x)
    if abs(nu.real) < 1e-15:
        return kernels.kscaled(nu.imag, x) * math.exp(-0.5 * math.pi * abs(nu.imag))
    return np.array([complex(mpmath.besselk(nu, float(v))) for v in np.ravel(x)]).reshape(np.shape(x))


@dataclass(frozen=True)
class EisensteinPoint:
    s: complex
    constant_term: tuple


def eisenstein_point(s):
    return EisensteinPoint(complex(s), (1.0, scattering(complex(s))))


def eisenstein_eval(z, s):
    """E(z, s) via its Fourier expansion at the reduced point."""
    s = complex(s)
    if abs(s - 1.0) < 1e-12:
        raise PoleError("E(z, s) has a pole at s = 1")
    z = np.asarray(z, dtype=complex)
    xs, ys = reduce_points(z.real.ravel(), z.imag.ravel())
    phi = scattering(s)
    out = ys ** s + phi * ys ** (1.0 - s)
    pref = 2.0 / xi(2.0 * s)
    nu = s - 0.5
    nmax = int(60.0 / (2.0 * math.pi * ys.min())) + 2
    for n in range(1, nmax + 1):
        arg = 2.0 * math.pi * n * ys
        live = arg < 60.0 + abs(nu.imag)
        if not live.any():
            break
        k = np.zeros(ys.shape, dtype=complex)
        k[live] = _k_order(nu, arg[live])
        coef = pref * n ** nu * _divisor_power(n, 1.0 - 2.0 * s)
        out = out + coef * np.sqrt(ys) * k * 2.0 * np.cos(2.0 * math.pi * n * xs)
    out = out.reshape(z.shape)
    return complex(out) if z.ndim == 0 else out


# ---------------------------------------------------------- catalog / Weyl

@dataclass
class Catalog:
    forms: list
    coverage: dict  # parity -> list of scanned (a, b) windows

    def covered_to(self, parity):
        reach = SCAN_START
        for a, b in sorted(self.coverage.get(parity, [])):
            if a > reach + 1e-12:
                break
            reach = max(reach, b)
        return reach

    def upto(self, T):
        return [f for f in self.forms if abs(f.t) <= T]


def build_catalog(T, truncation_factor=1, extend_to=DEFAULT_EXTENSION, locate_only=False):
    """Scan [1, T] in windows of width 2 for both parities."""
    forms, coverage = [], {"even": [], "odd": []}
    edges = list(np.arange(SCAN_START, T, 2.0)) + [T]
    for parity in ("even", "odd"):
        for a, b in zip(edges[:-1], edges[1:]):
            M = required_truncation(b) * truncation_factor
            if locate_only:
                found = [MaassForm(float(t), parity, c, len(c), r, float("nan"))
                         for t, c, r in locate_eigenvalues((a, b), parity, M)]
            else:
                found = solve_form((a, b), parity, M, extend_to)
            forms.extend(found)
            coverage[parity].append((float(a), float(b)))
    forms.sort(key=lambda f: f.t)
    return Catalog(forms, coverage)


def weyl_count(T, catalog):
    """Number of catalogued forms with |t| <= T, plus the T^2/12 comparison."""
    for parity in ("even", "odd"):
        if catalog.covered_to(parity) < T - 1e-12:
            raise IncompleteCatalogError(f"{parity} spectrum scanned only to {catalog.covered_to(parity)}")
    count = len(catalog.upto(T))
    main = T * T / 12.0
    return {"T": T, "count": count, "weyl_main_term": main, "ratio": count / main,
            "smoothed_count": smoothed_count(T)}


def smoothed_count(T):
    """Main terms of the cuspidal counting function with the scattering contribution removed.

    T^2/12 - (2T/pi) log(T / (e sqrt(pi/2))) - 131/144; the remainder is
    bounded and oscillates around zero.
    """
    if T <= 0:
        return 0.0
    return T * T / 12.0 - 2.0 * T / math.pi * math.log(T / (math.e * math.sqrt(0.5 * math.pi))) - 131.0 / 144.0
