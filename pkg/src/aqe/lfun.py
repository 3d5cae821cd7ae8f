"""L-function data, completed L-functions and the smoothed approximate functional equation.

Conventions: L(s) = sum a_n n^{-s} with Euler factors prod_j (1 - alpha_j(p) p^{-s})^{-1},
gamma factor gamma(s) = prod_j Gamma_R(s + mu_j) and

    Lambda(s) = (s(s-1))^r q^{s/2} gamma(s) L(s) = W conj(Lambda(1 - conj(s)))   (self-dual data).

For any A != 0 (complex allowed) the completed value splits as

    Lambda(s) = A^{-s} sum_n a_n J(sqrt(q) A / n; s) + W A^{1-s} sum_n conj(a_n) J~(sqrt(q) / (A n); 1-s),
    J(x; s0) = (1 / 2 pi i) int_{(c)} (z(z-1))^r gamma(z) x^z dz / (z - s0),

where J~ uses the dual gamma factor. The contour integral is a trapezoid sum on
Re z = c. Disagreement between two choices of A is the functional-equation
residual used throughout to validate parameters and root numbers.
"""

import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.special import digamma, loggamma

from .errors import (CoefficientShortfallError, ConductorTooLargeError, NonIntegerWindingError,
                     NotFundamentalError, UnramifiedOnlyError, ZeroOnBoundaryError)
from .maass import _spf, primes_upto

MAX_CONDUCTOR = 1e9  # accuracy verified to 1e-11 at 1.6e8 (degree 6)
CONTOUR_GAP = 0.6
STEP = 0.08
TOL = 1e-14
FE_A = 1.2
SAMPLE_POINTS = (0.6 + 0.5j, 0.7 + 1.5j, 0.8 + 2.5j)


@dataclass(frozen=True)
class LFunctionData:
    degree: int
    conductor: int
    arch_params: tuple
    pole_order: int
    coeffs: np.ndarray
    root_number: complex | None = None
    primes: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64), repr=False)
    satake: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=complex), repr=False)
    label: str = ""
    self_dual: bool = True
    factors: tuple = field(default=(), repr=False)

    @property
    def N(self):
        return len(self.coeffs)

    def dual(self):
        if self.self_dual:
            return self
        return replace(self, arch_params=tuple(np.conj(self.arch_params)), coeffs=np.conj(self.coeffs),
                       satake=np.conj(self.satake),
                       root_number=None if self.root_number is None else np.conj(self.root_number))

    def descriptor(self):
        """JSON-able summary (degree, conductor, parameters, 64 coefficients, W)."""
        def cpx(z):
            z = complex(z)
            return [z.real, z.imag]
        return {
            "label": self.label,
            "degree": self.degree,
            "conductor": int(self.conductor),
            "arch_params": [cpx(m) for m in self.arch_params],
            "pole_order": self.pole_order,
            "coeffs": [cpx(a) for a in self.coeffs[:64]],
            "root_number": None if self.root_number is None else cpx(self.root_number),
        }

    def to_json(self):
        return json.dumps(self.descriptor())

    @cached_property
    def _logs(self):
        return np.log(np.arange(1, self.N + 1, dtype=float))


RankinSelbergData = LFunctionData


# ------------------------------------------------------------- local data

def _newton(power_sums):
    # complete homogeneous h_k from power sums: k h_k = sum_{i=1}^k p_i h_{k-i}
    kmax = len(power_sums)
    h = np.zeros(kmax + 1, dtype=complex)
    h[0] = 1.0
    for k in range(1, kmax + 1):
        h[k] = np.dot(power_sums[:k], h[k - 1::-1][:k]) / k
    return h


def coefficients_from_satake(primes, satake, N):
    """Dirichlet coefficients a_1..a_N of prod_p prod_j (1 - alpha_j(p) p^{-s})^{-1}."""
    lam = np.zeros(N + 1, dtype=complex)
    lam[1] = 1.0
    local = {}
    for p, alpha in zip(primes, satake):
        p = int(p)
        if p > N:
            break
        kmax = int(math.log(N) / math.log(p) + 1e-9)
        while p ** (kmax + 1) <= N:
            kmax += 1
        pw = np.array([np.sum(alpha ** i) for i in range(1, kmax + 1)])
        local[p] = _newton(pw)
    spf = _spf(N)
    for n in range(2, N + 1):
        p = int(spf[n])
        m, k = n, 0
        while m % p == 0:
            m //= p
            k += 1
        lam[n] = local[p][k] * lam[m]
    return lam[1:]


def _satake_gl2(lam_p):
    # alpha + 1/alpha = lambda(p), |alpha| = 1 when |lambda(p)| <= 2
    disc = np.sqrt(np.asarray(lam_p, dtype=complex) ** 2 - 4.0)
    a = 0.5 * (lam_p + disc)
    return np.stack([a, 1.0 / a], axis=1)


# ------------------------------------------------------------- constructors

def zeta():
    return dirichlet_l(1)


def _is_fundamental(D):
    from sympy import factorint
    if D == 1:
        return True
    if D == 0:
        return False
    f = factorint(abs(D))
    if D % 4 == 1:
        return all(e == 1 for e in f.values())
    if D % 4 == 0:
        m = D // 4
        if m % 4 not in (2, 3):
            return False
        return all(e == 1 for q, e in factorint(abs(m)).items())
    return False


def dirichlet_l(D, N=None):
    """L(s, chi_D) for a fundamental discriminant D (D = 1 gives zeta)."""
    from sympy.functions.combinatorial.numbers import kronecker_symbol
    D = int(D)
    if abs(D) > 10 ** 6 or not _is_fundamental(D):
        raise NotFundamentalError(f"{D} is not a fundamental discriminant")
    if N is None:
        N = max(64, int(30 * math.sqrt(abs(D))) + 50)
    primes = primes_upto(N)
    chi = np.array([kronecker_symbol(D, int(p)) for p in primes], dtype=complex)
    satake = chi[:, None]
    coeffs = coefficients_from_satake(primes, satake, N).real.astype(complex)
    mu = (0.0,) if D > 0 else (1.0,)
    label = "zeta" if D == 1 else f"chi_{D}"
    return LFunctionData(1, abs(D), tuple(complex(m) for m in mu), 1 if D == 1 else 0, coeffs,
                         1.0 + 0j, primes, satake, label, True)


def _maass_satake(coeffs):
    N = len(coeffs)
    primes = primes_upto(N)
    return primes, _satake_gl2(np.asarray(coeffs)[primes - 1])


def from_maass(form, shifts=None, N=None):
    """Standard L-function of a level-1 Maass form.

    Parameters {i t + d1, -i t + d2}; unless ``shifts`` is given the parity
    shifts d1, d2 and the root number are resolved by the functional-equation
    residual over {0, 1}^2.
    """
    coeffs = np.asarray(form.coeffs if N is None else form.coeffs[:N], dtype=float)
    primes, sat = _maass_satake(coeffs)
    t = form.t
    base = LFunctionData(2, 1, (), 0, coeffs.astype(complex), None, primes, sat,
                         f"L({form.form_id})", True)
    if shifts is not None:
        cands = [tuple(shifts)]
    else:
        cands = [(0, 0), (1, 1), (0, 1), (1, 0)]
    mus = [(complex(d1, t), complex(d2, -t)) for d1, d2 in cands]
    return resolve(base, mus)


def adjoint(form, shifts=None, N=None):
    """Adjoint (symmetric-square) L-function: Satake {alpha^2, 1, alpha^-2}."""
    coeffs = np.asarray(form.coeffs if N is None else form.coeffs[:N], dtype=float)
    primes, sat = _maass_satake(coeffs)
    a = sat[:, 0]
    ad = np.stack([a * a, np.ones_like(a), 1.0 / (a * a)], axis=1)
    lam = coefficients_from_satake(primes, ad, len(coeffs)).real.astype(complex)
    t = form.t
    base = LFunctionData(3, 1, (), 0, lam, None, primes, ad, f"Ad({form.form_id})", True)
    if shifts is not None:
        cands = [tuple(shifts)]
    else:
        cands = [(d1, d2, d3) for d1 in (0, 1) for d2 in (0, 1) for d3 in (0, 1)]
    mus = [(complex(d1, 2 * t), complex(d2, 0.0), complex(d3, -2 * t)) for d1, d2, d3 in cands]
    return resolve(base, mus)


def _reduce_shift(m):
    # archimedean parameters are (sign-character shift in {0,1}) + i (spectral part)
    m = complex(m)
    d = round(m.real)
    if abs(m.real - d) < 1e-9:
        return complex(d % 2, m.imag)
    return m


def rankin_selberg(a, b, N=None, verify=False):
    """Rankin-Selberg product of two unramified L-functions."""
    if a.conductor != 1 or b.conductor != 1:
        raise UnramifiedOnlyError("Rankin-Selberg products are implemented for level 1 only")
    N = min(a.N, b.N) if N is None else N
    P = min(len(a.primes), len(b.primes))
    primes = a.primes[:P]
    sat = (a.satake[:P, :, None] * b.satake[:P, None, :]).reshape(P, -1)
    primes_n = primes[primes <= N]
    lam = coefficients_from_satake(primes_n, sat[:len(primes_n)], N)
    self_dual = a.self_dual and b.self_dual
    if self_dual:
        lam = lam.real.astype(complex)
    mus = tuple(_reduce_shift(m1 + m2) for m1 in a.arch_params for m2 in b.arch_params)
    pole = 1 if _is_dual_pair(a, b) else 0
    data = LFunctionData(a.degree * b.degree, 1, mus, pole, lam, None, primes, sat,
                         f"{a.label}x{b.label}", self_dual, (a, b))
    if verify or data.root_number is None:
        data = resolve(data, [mus])
    return data


def _is_dual_pair(a, b):
    if a.degree != b.degree:
        return False
    n = min(a.N, b.N, 200)
    bd = b.dual()
    same_mu = sorted(np.round(a.arch_params, 9), key=lambda z: (z.real, z.imag)) == \
        sorted(np.round(bd.arch_params, 9), key=lambda z: (z.real, z.imag))
    return same_mu and np.allclose(a.coeffs[:n], bd.coeffs[:n], atol=1e-8)


# --------------------------------------------------------------- AFE engine

def _log_gamma(z, mus):
    out = np.zeros(np.shape(z), dtype=complex)
    for m in mus:
        w = z + m
        out += -0.5 * w * math.log(math.pi) + loggamma(0.5 * w)
    return out


def _log_pole(z, r):
    if r == 0:
        return np.zeros(np.shape(z), dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        return r * (np.log(z) + np.log(z - 1.0))


def analytic_conductor(L, t=0.0):
    """C(pi, t) = q prod_j (3 + |i t + mu_j|)."""
    return float(L.conductor * np.prod([3.0 + abs(1j * t + m) for m in L.arch_params]))


def _weight(s, mus, c=None):
    """log A making the weighted integrand stationary at height Im s.

    With A = exp(-i beta) the weight |A^z| = e^{beta y} tilts the contour
    integrand; beta = -d/dy log|gamma(c+iy)| at y = Im s cancels its slope
    there, clipped so the integrand still decays in both directions.
    """
    s = complex(s)
    tau = s.imag
    if tau == 0.0:
        return 0.0j
    c = max(1.0, s.real, 1.0 - s.real) + CONTOUR_GAP if c is None else c
    z = c + 1j * tau
    slope = sum(-0.5 * float(digamma(0.5 * (z + m)).imag) for m in mus)
    full = 0.25 * math.pi * len(mus)
    margin = max(0.05, 2.0 / abs(tau))
    cap = max(full - margin, 0.0)
    beta = float(np.clip(-slope, -cap, cap))
    return -1j * beta


class _Kernel:
    """Trapezoid nodes for J(x; s0) = (1/2 pi i) int gamma(z) P(z) x^z dz/(z - s0)."""

    def __init__(self, mus, r, s0, log_a, c):
        self.c = c
        lg = lambda y: _log_gamma(c + 1j * y, mus) + _log_pole(c + 1j * y, r) + (c + 1j * y) * log_a
        # locate the bulk of |integrand| on a coarse grid, then refine
        ys = np.arange(-400.0, 400.0 + 1e-9, 1.0)
        mag = lg(ys).real - np.log(np.abs(c + 1j * ys - s0))
        top = mag.max()
        live = np.nonzero(mag > top - 40.0)[0]
        lo, hi = ys[max(live[0] - 1, 0)], ys[min(live[-1] + 1, len(ys) - 1)]
        if live[0] == 0 or live[-1] == len(ys) - 1:
            wide = np.arange(-4000.0, 4000.0 + 1e-9, 2.0)
            m2 = lg(wide).real - np.log(np.abs(c + 1j * wide - s0))
            lv = np.nonzero(m2 > top - 40.0)[0]
            lo, hi = wide[max(lv[0] - 1, 0)], wide[min(lv[-1] + 1, len(wide) - 1)]
        n = int(math.ceil((hi - lo) / STEP))
        y = lo + STEP * np.arange(n + 1)
        z = c + 1j * y
        self.z = z
        self.v = np.exp(lg(y)) / (z - s0) * (STEP / (2.0 * math.pi))
        self.top = top
        self.mus = mus
        self.r = r
        self.s0 = s0
        self.log_a = log_a

    def scale(self):
        return float(np.sum(np.abs(self.v)))

    def __call__(self, logx):
        # sum_k v_k exp(z_k log x) for a vector of log x
        out = np.empty(len(logx), dtype=complex)
        for lo in range(0, len(logx), 512):
            lx = logx[lo:lo + 512]
            out[lo:lo + 512] = np.exp(np.outer(lx, self.z)) @ self.v
        return out

    def tail_terms(self, logq, amax, theta, tol):
        """Smallest N with sum_{n>N} amax n^theta |J(sqrt(q)/n)| <= tol (contour shift bound)."""
        best = None
        # the bound only needs |integrand| integrated to a few percent: unit spacing suffices
        stride = max(1, int(round(1.0 / STEP)))
        y = self.z.imag[::stride]
        rising = 0
        for cp in np.arange(self.c, self.c + 80.0, 1.0):
            if cp <= 1.0 + theta + 0.05:
                continue
            zz = cp + 1j * y
            lmag = (_log_gamma(zz, self.mus) + _log_pole(zz, self.r) + zz * self.log_a).real
            lmag = lmag - np.log(np.abs(zz - self.s0))
            top = lmag.max()
            logB = top + math.log(np.sum(np.exp(lmag - top)) * STEP * stride / (2.0 * math.pi))
            e = cp - 1.0 - theta
            # amax B q^{cp/2} N^{-e} / e <= tol
            logN = (math.log(amax / (e * tol)) + logB + cp * logq) / e
            n = math.exp(min(logN, 50.0))
            if best is not None and n > best:
                rising += 1
                if rising >= 3:
                    break
            else:
                rising = 0
            best = n if best is None else min(best, n)
        return int(math.ceil(best)) if best is not None else None


def _growth(coeffs, theta=0.5):
    n = np.arange(1, len(coeffs) + 1)
    return max(1.0, float(np.max(np.abs(coeffs) / n ** theta))), theta


@dataclass
class LambdaParts:
    value: complex
    first: complex
    second: complex
    terms: int
    scale: float


def lambda_parts(L, s, log_a=None, mus=None, check=True):
    """Both sums of the split formula (value uses L.root_number, default 1)."""
    s = complex(s)
    mus = tuple(L.arch_params) if mus is None else tuple(mus)
    dmus = tuple(np.conj(mus)) if not L.self_dual else mus
    if check:
        cond = float(L.conductor * np.prod([3.0 + abs(1j * s.imag + m) for m in mus]))
        if cond > MAX_CONDUCTOR:
            raise ConductorTooLargeError(f"analytic conductor {cond:.3g} exceeds {MAX_CONDUCTOR:.0e}")
    if log_a is None:
        log_a = _weight(s, mus)
    c = max(1.0, s.real, 1.0 - s.real) + CONTOUR_GAP
    k1 = _Kernel(mus, L.pole_order, s, log_a, c)
    k2 = _Kernel(dmus, L.pole_order, 1.0 - s, -log_a, c)
    logq = 0.5 * math.log(L.conductor)
    amax, theta = _growth(L.coeffs)
    scale = max(k1.scale() * math.exp(c * logq), k2.scale() * math.exp(c * logq))
    need = max(k1.tail_terms(logq, amax, theta, TOL * scale) or 1,
               k2.tail_terms(logq, amax, theta, TOL * scale) or 1)
    if need > L.N:
        raise CoefficientShortfallError(f"{L.label}: AFE needs {need} coefficients, have {L.N}")
    logs = L._logs[:need]
    a = L.coeffs[:need]
    first = np.exp(-s * log_a) * np.dot(a, k1(logq - logs))
    second = np.exp((1.0 - s) * log_a) * np.dot(np.conj(a), k2(logq - logs))
    W = 1.0 if L.root_number is None else L.root_number
    return LambdaParts(first + W * second, first, second, need, scale)


def complete_lambda(L, s, log_a=None):
    """Lambda(s) = (s(s-1))^r q^{s/2} gamma(s) L(s)."""
    return lambda_parts(L, s, log_a).value


def afe_value(L, s):
    """L(s) from the completed value."""
    s = complex(s)
    lam = complete_lambda(L, s)
    lg = _log_gamma(np.array([s]), L.arch_params)[0] + _log_pole(np.array([s]), L.pole_order)[0]
    return lam * np.exp(-lg - 0.5 * s * math.log(L.conductor))


def fe_residual(L, s, a=FE_A):
    """|Lambda(s) - W conj(Lambda~(1 - conj s))| / |Lambda(s)| with a non-trivial weight.

    Both values come from the split formula with the same weight A = a, which
    makes the comparison equivalent to changing A -> 1/A: it vanishes only
    when coefficients, parameters and root number are mutually consistent.
    """
    s = complex(s)
    la = math.log(a) + _weight(s, L.arch_params)
    W = 1.0 if L.root_number is None else L.root_number
    left = complete_lambda(L, s, la)
    right = complete_lambda(L.dual(), 1.0 - np.conj(s), math.log(a) + _weight(1.0 - np.conj(s), L.dual().arch_params))
    return float(abs(left - W * np.conj(right)) / abs(left))


def fit_root_number(L, mus, points=SAMPLE_POINTS[:2], weights=(0.0, math.log(FE_A))):
    """W from the A-independence of Lambda at two sample points."""
    ws = []
    for s in points:
        p1 = lambda_parts(L, s, weights[0] + _weight(s, mus), mus)
        p2 = lambda_parts(L, s, weights[1] + _weight(s, mus), mus)
        ws.append((p1.first - p2.first) / (p2.second - p1.second))
    W = complex(np.mean(ws))
    return W, float(abs(ws[0] - ws[1]))


def resolve(base, candidates, points=SAMPLE_POINTS):
    """Choose arch parameters and root number minimising the FE residual."""
    best = None
    for mus in candidates:
        W, spread = fit_root_number(base, mus, points[:2])
        if abs(abs(W) - 1.0) > 1e-3:
            W_use = W / abs(W) if abs(W) > 0 else 1.0
        else:
            W_use = W / abs(W)
        if base.self_dual and abs(W_use.imag) < 1e-6:
            W_use = complex(np.sign(W_use.real))
        trial = replace(base, arch_params=tuple(mus), root_number=W_use)
        res = fe_residual(trial, points[2])
        if best is None or res < best[0]:
            best = (res, trial)
    return best[1]


# ------------------------------------------------------------------ reports

def bh_inequality_check(a, b, t=0.0):
    """Both elementary conductor inequalities for a Rankin-Selberg pair."""
    mus = [_reduce_shift(m1 + m2) for m1 in a.arch_params for m2 in b.arch_params]
    rs = LFunctionData(a.degree * b.degree, 1, tuple(mus), 0, np.ones(1, dtype=complex))
    c_rs_t = analytic_conductor(rs, t)
    c_rs = analytic_conductor(rs, 0.0)
    bound_t = c_rs * (3.0 + abs(t)) ** (a.degree * b.degree)
    c_a, c_b = analytic_conductor(a), analytic_conductor(b)
    bound = c_a ** b.degree * c_b ** a.degree
    return {"C_rs_t": c_rs_t, "C_rs_t_bound": bound_t, "C_rs": c_rs, "C_rs_bound": bound,
            "holds": bool(c_rs_t <= bound_t * (1 + 1e-12) and c_rs <= bound * (1 + 1e-12))}


def central_bound_report(L, t=0.0):
    """|L(1/2+it)|, the convexity benchmark and |L(3/2+it)|^2 (no assertion)."""
    v = abs(afe_value(L, 0.5 + 1j * t))
    bench = analytic_conductor(L, 0.0) ** 0.25 * (3.0 + abs(t)) ** (0.25 * L.degree)
    v3 = abs(afe_value(L, 1.5 + 1j * t))
    return {"abs_central": v, "convexity_benchmark": bench, "ratio": v / bench, "abs_L_3_2_sq": v3 * v3}


def _log_normaliser(L, s):
    s = np.asarray(s, dtype=complex)
    return (_log_gamma(s, L.arch_params) + _log_pole(s, L.pole_order)
            + 0.5 * s * math.log(L.conductor))


def count_zeros(L, sigma, T, right=2.0, max_depth=14):
    """Zeros of Lambda in {Re s >= sigma, |Im s| <= T} by the argument principle."""
    corners = [complex(right, -T), complex(right, T), complex(sigma, T), complex(sigma, -T)]
    total = 0.0
    for p, q in zip(corners, corners[1:] + corners[:1]):
        n = max(2, int(math.ceil(abs(q - p) / 0.25)))
        pts = [p + (q - p) * k / n for k in range(n + 1)]
        vals = [_lambda_checked(L, z) for z in pts]
        for k in range(n):
            total += _arg_change(L, pts[k], pts[k + 1], vals[k], vals[k + 1], max_depth)
    winding = total / (2.0 * math.pi)
    count = round(winding)
    if abs(winding - count) > 0.1:
        raise NonIntegerWindingError(f"winding {winding:.4f} is not close to an integer")
    return int(count)


def _lambda_checked(L, z):
    v = complete_lambda(L, z)
    # size of L(z) itself decides whether the contour passes through a zero
    lnorm = abs(v) / abs(np.exp(_log_normaliser(L, z)))
    if lnorm < 1e-8:
        raise ZeroOnBoundaryError(f"Lambda nearly vanishes at {z}")
    return v


def _arg_change(L, p, q, vp, vq, depth):
    d = float(np.angle(vq / vp))
    if abs(d) < 0.5 or depth == 0:
        return d
    m = 0.5 * (p + q)
    vm = _lambda_checked(L, m)
    return (_arg_change(L, p, m, vp, vm, depth - 1) + _arg_change(L, m, q, vm, vq, depth - 1))
