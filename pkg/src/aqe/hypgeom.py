"""Hyperbolic geometry of the modular surface SL2(Z)\\H.

Points of the upper half-plane are plain Python/numpy complex numbers.
The measure is dmu = y^{-2} dx dy, so the fundamental domain has area pi/3.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotInjectiveError, ResolutionError

SQRT3_2 = math.sqrt(3.0) / 2.0
DOMAIN_AREA = math.pi / 3.0


def hyp_distance(z, w):
    """Hyperbolic distance log((|z-w*|+|z-w|)/(|z-w*|-|z-w|))."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    # 2 asinh form: identical value, no cancellation for nearby points
    d = 2.0 * np.arcsinh(np.abs(z - w) / (2.0 * np.sqrt(z.imag * w.imag)))
    return float(d) if d.ndim == 0 else d


def reduce(z):
    """Reduce z into the standard fundamental domain.

    Returns (z', gamma) with gamma an integer 2x2 matrix of determinant 1 and
    gamma z = z'.
    """
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("point must lie in the upper half-plane")
    g = np.eye(2, dtype=np.int64)
    for _ in range(10000):
        n = math.floor(z.real + 0.5)
        if n:
            z -= n
            g = np.array([[1, -n], [0, 1]], dtype=np.int64) @ g
        if abs(z) < 1.0 - 1e-15:
            z = -1.0 / z
            g = np.array([[0, -1], [1, 0]], dtype=np.int64) @ g
        else:
            break
    if g[1, 0] < 0 or (g[1, 0] == 0 and g[1, 1] < 0):
        g = -g
    return z, g


def reduce_points(x, y):
    """Vectorised reduction of arrays of points (no group words)."""
    x = np.array(x, dtype=float, copy=True)
    y = np.array(y, dtype=float, copy=True)
    for _ in range(10000):
        x -= np.floor(x + 0.5)
        r = x * x + y * y
        m = r < 1.0 - 1e-15
        if not m.any():
            break
        x[m] = -x[m] / r[m]
        y[m] = y[m] / r[m]
    return x, y


def mobius(g, z):
    a, b, c, d = (float(v) for v in np.asarray(g).ravel())
    return (a * z + b) / (c * z + d)


@dataclass(frozen=True)
class GeodesicBall:
    center: complex
    radius: float
    injective: bool = True

    @classmethod
    def checked(cls, center, radius):
        """Ball with the injectivity flag computed from the center."""
        return cls(complex(center), float(radius), radius <= injectivity_radius(center) + 1e-12)


def ball_measure(ball):
    """mu(B) = 4 pi sinh^2(r/2) for an injective ball."""
    if not ball.injective:
        raise NotInjectiveError("ball measure on the quotient needs an injective ball")
    return disk_area(ball.radius)


def disk_area(r):
    """Area of a hyperbolic disk of radius r in H."""
    return 4.0 * math.pi * math.sinh(0.5 * r) ** 2


def _displacement_sq(x, y, a, b, c, d):
    # squared Frobenius norm of g^{-1} gamma g, g = [[sqrt y, x/sqrt y], [0, 1/sqrt y]]
    top1 = a - c * x
    top2 = (a * x + b - c * x * x - d * x) / y
    return top1 * top1 + top2 * top2 + (c * y) ** 2 + (c * x + d) ** 2


def injectivity_radius(z):
    """Half the minimal displacement d(z, gamma z) over gamma != +-1.

    Uses 2 cosh d(z, gamma z) = |g^{-1} gamma g|_F^2. The bottom row of that
    matrix has squared norm |cz+d|^2, which bounds the search over (c, d);
    the top row is then minimised over the coset (a, b) + k (c, d).
    """
    z, _ = reduce(z)
    x, y = z.real, z.imag
    best = 2.0 + 1.0 / (y * y)  # translation by 1
    c = 1
    while (c * y) ** 2 <= best:
        rest = best - (c * y) ** 2
        half = math.sqrt(max(rest, 0.0))
        for d in range(math.ceil(-c * x - half) - 1, math.floor(-c * x + half) + 2):
            if math.gcd(c, d) != 1:
                continue
            # particular solution a d - b c = 1
            a0, b0 = _bezout(c, d)
            u = c * x + d
            p0 = a0 - c * x
            q0 = (a0 * x + b0 - c * x * x - d * x) / y
            # top row (p0 + k c, q0 + k u / y); minimise over integer k
            denom = c * c + (u / y) ** 2
            k0 = -(p0 * c + q0 * u / y) / denom
            for k in (math.floor(k0), math.ceil(k0)):
                a, b = a0 + k * c, b0 + k * d
                v = _displacement_sq(x, y, a, b, c, d)
                if v < best and not (c == 0 and b == 0):
                    best = v
        c += 1
    return 0.5 * math.acosh(max(best, 2.0) / 2.0)


def orbit_displacements(z, dmax):
    """Sorted distances d(z, gamma z) <= dmax over gamma in PSL2(Z), gamma != 1."""
    x, y = complex(z).real, complex(z).imag
    bound = 2.0 * math.cosh(dmax)
    out = []
    # translations z -> z + b
    b = 1
    while 2.0 + (b / y) ** 2 <= bound:
        out += [math.acosh(1.0 + 0.5 * (b / y) ** 2)] * 2
        b += 1
    c = 1
    while (c * y) ** 2 <= bound:
        half = math.sqrt(bound - (c * y) ** 2)
        for d in range(math.ceil(-c * x - half) - 1, math.floor(-c * x + half) + 2):
            if math.gcd(c, d) != 1:
                continue
            a0, b0 = _bezout(c, d)
            u = c * x + d
            p0 = a0 - c * x
            q0 = (a0 * x + b0 - c * x * x - d * x) / y
            # |top row|^2 = A k^2 + B k + C0 over the coset (a0 + k c, b0 + k d)
            A = c * c + (u / y) ** 2
            B = 2.0 * (p0 * c + q0 * u / y)
            C0 = p0 * p0 + q0 * q0 + (c * y) ** 2 + u * u - bound
            disc = B * B - 4.0 * A * C0
            if disc < 0:
                continue
            k_lo = math.ceil((-B - math.sqrt(disc)) / (2.0 * A))
            k_hi = math.floor((-B + math.sqrt(disc)) / (2.0 * A))
            for k in range(k_lo, k_hi + 1):
                v = _displacement_sq(x, y, a0 + k * c, b0 + k * d, c, d)
                if v <= bound:
                    out.append(math.acosh(max(v, 2.0) / 2.0))
        c += 1
    return sorted(out)


def _bezout(c, d):
    # a, b with a d - b c = 1
    g, s, t = _egcd(d, c)
    return s, -t


def _egcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, s, t = _egcd(b, a % b)
    return g, t, s - (a // b) * t


@dataclass(frozen=True)
class QuadratureGrid:
    """Gauss-Legendre product grid in (x, log y).

    ``region`` is "domain" for the truncated fundamental domain
    {|x| <= 1/2, |z| >= 1, y <= Y} or "strip" for {|x| <= 1/2, floor <= y <= Y}.
    """
    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    cusp_height: float
    nx: int
    ny: int
    region: str = "domain"
    floor: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def points(self):
        return self.x + 1j * self.y

    def integrate(self, values):
        return np.sum(self.w * values)

    def refine(self, factor=2):
        return build_grid(self.cusp_height, self.nx * factor, self.ny * factor,
                          region=self.region, floor=self.floor, max_nodes=None)


def build_grid(cusp_height, nx=64, ny=64, region="domain", floor=None, max_nodes=400000):
    """Quadrature grid over the fundamental domain truncated at y <= cusp_height."""
    if region == "domain" and cusp_height < 2:
        raise ValueError("cusp height must be at least 2")
    if max_nodes is not None and nx * ny > max_nodes:
        raise ResolutionError(f"{nx * ny} nodes exceed the configured maximum {max_nodes}")
    gx, wx = np.polynomial.legendre.leggauss(nx)
    gu, wu = np.polynomial.legendre.leggauss(ny)
    xs = 0.5 * gx
    wxs = 0.5 * wx
    if region == "domain":
        lo = 0.5 * np.log(1.0 - xs * xs)
        fl = 0.0
    elif region == "strip":
        fl = SQRT3_2 if floor is None else float(floor)
        lo = np.full(nx, math.log(fl))
    else:
        raise ValueError(f"unknown region {region!r}")
    hi = math.log(cusp_height)
    half = 0.5 * (hi - lo)
    u = lo[:, None] + half[:, None] * (gu[None, :] + 1.0)
    y = np.exp(u)
    # dmu = dx dy / y^2 = dx du / y
    w = wxs[:, None] * half[:, None] * wu[None, :] / y
    x = np.broadcast_to(xs[:, None], y.shape)
    return QuadratureGrid(np.ascontiguousarray(x).ravel(), y.ravel(), w.ravel(),
                          float(cusp_height), nx, ny, region, fl)


def ball_nodes(center, radius, nr=32, ntheta=64):
    """Geodesic polar quadrature nodes for a disk of radius ``radius`` in H.

    Returns (z, w) with sum(w * f(z)) ~ integral of f over B(center, radius).
    The disk is parametrised by geodesic polar coordinates, dmu = sinh(rho) drho dtheta.
    """
    g, gw = np.polynomial.legendre.leggauss(nr)
    rho = 0.5 * radius * (g + 1.0)
    wr = 0.5 * radius * gw * np.sinh(rho)
    theta = 2.0 * math.pi * np.arange(ntheta) / ntheta
    zeta = np.tanh(0.5 * rho)[:, None] * np.exp(1j * theta)[None, :]
    # disk model -> H with 0 -> i, then the affine map i -> center
    h = 1j * (1.0 + zeta) / (1.0 - zeta)
    center = complex(center)
    z = center.real + center.imag * h
    w = np.broadcast_to(wr[:, None] * (2.0 * math.pi / ntheta), z.shape)
    return z.ravel(), np.ascontiguousarray(w).ravel()
