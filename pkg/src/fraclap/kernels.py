"""Closed-form kernels: Riesz, ring, ball Green/Poisson, fractional Laplacian, Kelvin.

Kernels take radii and an angle cosine rather than full vectors; every use
in radially-reduced potential theory is either radial or depends on one
angle only, and this keeps the module dimension-generic.

Normalization conventions (all standard, mutually consistent, and pinned by
the inversion / representation-identity tests):

* fractional Laplacian:  C(n, alpha) = 2^alpha Gamma((n+alpha)/2) /
  (pi^(n/2) |Gamma(-alpha/2)|)
* Riesz potential:       R(gamma, n) = Gamma((n-gamma)/2) /
  (pi^(n/2) 2^gamma Gamma(gamma/2))
* ball Poisson kernel:   Gamma(n/2) sin(pi alpha/2) / pi^(n/2+1)
* ball Green function:   Gamma(n/2) / (2^alpha pi^(n/2) Gamma(alpha/2)^2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import beta as _beta
from scipy.special import betainc as _betainc
from scipy.special import gamma as _gamma
from scipy.special import roots_laguerre

from .core import QuadratureSpec, RadialFunction, Tail
from .errors import DivergentTail, OutOfRange, Singular, XOutsideBall
from .quad import DEFAULT_SPEC, integrate, integrate_pv_symmetric

__all__ = [
    "BallKernelParams",
    "KernelConstants",
    "sphere_area",
    "riesz_constant",
    "frac_constant",
    "poisson_constant",
    "green_constant",
    "kernel_constants",
    "ring_kernel",
    "riesz_potential",
    "frac_laplacian",
    "green_inner",
    "green_ball",
    "poisson_ball",
    "kelvin",
]


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere in R^n (omega_{n-1})."""
    if n < 1:
        raise OutOfRange("n", f"need n >= 1, got {n}")
    return 2.0 * math.pi ** (n / 2.0) / _gamma(n / 2.0)


def riesz_constant(gamma: float, n: int) -> float:
    """Riesz potential constant Gamma((n-g)/2) / (pi^(n/2) 2^g Gamma(g/2))."""
    if not 0.0 < gamma < n:
        raise OutOfRange("gamma", f"need 0 < gamma < n = {n}, got {gamma}")
    return _gamma((n - gamma) / 2.0) / (math.pi ** (n / 2.0) * 2.0 ** gamma * _gamma(gamma / 2.0))


def frac_constant(n: int, alpha: float) -> float:
    """Normalization of the principal-value fractional Laplacian."""
    if not 0.0 < alpha < 2.0:
        raise OutOfRange("alpha", f"need 0 < alpha < 2, got {alpha}")
    return 2.0 ** alpha * _gamma((n + alpha) / 2.0) / (
        math.pi ** (n / 2.0) * abs(_gamma(-alpha / 2.0)))


def poisson_constant(n: int, alpha: float) -> float:
    """Ball Poisson-kernel constant; makes harmonic measure a probability."""
    if not 0.0 < alpha < 2.0:
        raise OutOfRange("alpha", f"need 0 < alpha < 2, got {alpha}")
    return _gamma(n / 2.0) * math.sin(math.pi * alpha / 2.0) / math.pi ** (n / 2.0 + 1.0)


def green_constant(n: int, alpha: float) -> float:
    """Prefactor of the ball Green function for the fractional Laplacian."""
    if not 0.0 < alpha < 2.0:
        raise OutOfRange("alpha", f"need 0 < alpha < 2, got {alpha}")
    return _gamma(n / 2.0) / (2.0 ** alpha * math.pi ** (n / 2.0) * _gamma(alpha / 2.0) ** 2)


@dataclass(frozen=True)
class KernelConstants:
    """The normalization constants for one (n, alpha) pair."""

    c_frac: float
    c_poisson: float
    c_green: float


def kernel_constants(n: int, alpha: float) -> KernelConstants:
    return KernelConstants(frac_constant(n, alpha),
                           poisson_constant(n, alpha),
                           green_constant(n, alpha))


@dataclass(frozen=True)
class BallKernelParams:
    """Ball radius, fractional order, and dimension for the ball kernels."""

    R: float
    alpha: float
    n: int

    def __post_init__(self):
        if not self.R > 0:
            raise OutOfRange("R", f"ball radius must be > 0, got {self.R}")
        if not 0.0 < self.alpha < 2.0:
            raise OutOfRange("alpha", f"need 0 < alpha < 2, got {self.alpha}")
        if self.n < 1:
            raise OutOfRange("n", f"need n >= 1, got {self.n}")


# ---------------------------------------------------------------------------
# ring kernel: spherical mean of |x-y|^(gamma-n)


def _angular_mass(n: int) -> float:
    return math.sqrt(math.pi) * _gamma((n - 1) / 2.0) / _gamma(n / 2.0)


def _ring_closed_n3(r: float, s: float, gamma: float) -> float:
    if abs(gamma - 1.0) < 1e-13:
        return math.log((r + s) / abs(r - s)) / (2.0 * r * s)
    g1 = gamma - 1.0
    return ((r + s) ** g1 - abs(r - s) ** g1) / (2.0 * r * s * g1)


def ring_kernel(r: float, s: float, gamma: float, n: int,
                spec: QuadratureSpec | None = None) -> float:
    """Spherical mean of |x-y|^(gamma-n) over |y| = s, evaluated at |x| = r.

    Symmetric in (r, s).  On the diagonal r = s the angular singularity is
    integrable only for gamma > 1; gamma <= 1 raises :class:`Singular`.
    n = 3 (and n = 1) use the elementary antiderivative of the polar-angle
    integral; other dimensions use Jacobi-weighted quadrature in cos(theta).
    """
    spec = spec or DEFAULT_SPEC
    if r < 0 or s < 0:
        raise OutOfRange("r", "radii must be >= 0")
    if not 0.0 < gamma < n:
        raise OutOfRange("gamma", f"need 0 < gamma < n = {n}, got {gamma}")
    if r == s:
        if r == 0.0:
            return math.inf
        if gamma <= 1.0:
            raise Singular(f"ring kernel diverges at r = s for gamma = {gamma} <= 1")
    if r == 0.0 or s == 0.0:
        return max(r, s) ** (gamma - n)
    if n == 1:
        return 0.5 * (abs(r - s) ** (gamma - 1.0) + (r + s) ** (gamma - 1.0))
    if n == 3 and r != s:
        return _ring_closed_n3(r, s, gamma)

    expo = (gamma - n) / 2.0
    half = (n - 3) / 2.0
    mu = -half  # (1 -+ c)^((n-3)/2) folded into the Jacobi weight

    if r == s:
        # combined endpoint exponent at c = 1 is (gamma-3)/2 for every n
        def f(c):
            return (2.0 * r * r * (1.0 - c)) ** expo * (1.0 - c * c) ** half
        val = integrate(f, -1.0, 1.0, mu_a=mu, mu_b=(3.0 - gamma) / 2.0, spec=spec)
    else:
        def f(c):
            return (r * r + s * s - 2.0 * r * s * c) ** expo * (1.0 - c * c) ** half
        val = integrate(f, -1.0, 1.0, mu_a=mu, mu_b=mu, spec=spec)
    return val / _angular_mass(n)


# ---------------------------------------------------------------------------
# Riesz potential of a radial function


def _log_edge_integral(g, edge: float, width: float, side: int, nodes: int = 32) -> float:
    """integral over t in (0, width) of g(edge + side*t) * log(1/t) dt.

    Substituting t = width * exp(-v) turns the log endpoint into a
    Gauss-Laguerre integral; the rule is compared at two node counts and the
    finer value returned.
    """
    def eval_with(m):
        v, w = roots_laguerre(m)
        t = width * np.exp(-v)
        vals = g(edge + side * t) * (v + math.log(1.0 / width))
        return width * float(np.dot(w, vals))

    return eval_with(2 * nodes)


def _support_bounds(f: RadialFunction):
    nz = np.nonzero(f.values)[0]
    if nz.size == 0:
        lo = hi = None
    else:
        lo = 0.0 if (nz[0] == 0 and f.inner != "none") else float(f.grid[max(nz[0] - 1, 0)])
        hi = float(f.grid[min(nz[-1] + 1, f.grid.size - 1)])
    has_tail = f.tail is not None and f.tail.c != 0.0
    return lo, hi, has_tail


def _riesz_radial_integral_n3(f, r, s_lo, s_hi, gamma, spec, inner_breaks):
    """integral of s^2 f(s) ring3(r, s) ds over (s_lo, s_hi), n = 3.

    The ring kernel splits into a smooth part and |r-s|^(gamma-1) (log for
    gamma = 1); the singular part is integrated with the matching Jacobi or
    Laguerre rule so the diagonal costs no adaptivity.
    """
    g1 = gamma - 1.0
    log_case = abs(g1) < 1e-13

    def smooth_part(s):
        if log_case:
            kern = np.log(r + s)
        else:
            kern = (r + s) ** g1 / g1
        return s * f(s) * kern / (2.0 * r)

    def sing_factor(s):
        return s * f(s) / (2.0 * r)

    brk = [t for t in inner_breaks if s_lo < t < s_hi]
    total = integrate(smooth_part, s_lo, s_hi, breakpoints=brk, spec=spec)

    if not s_lo < r < s_hi:
        # no diagonal inside; the |r-s| factor is smooth here
        if log_case:
            def reg(s):
                return -sing_factor(s) * np.log(np.abs(r - s))
        else:
            def reg(s):
                return -sing_factor(s) * np.abs(r - s) ** g1 / g1
        total += integrate(reg, s_lo, s_hi, breakpoints=brk, spec=spec)
        return total

    for lo, hi, side in ((s_lo, r, -1), (r, s_hi, +1)):
        if hi <= lo:
            continue
        if log_case:
            w = min(hi - lo, 0.5 * r)
            if side < 0:
                total += _log_edge_integral(sing_factor, r, w, -1, spec.gauss_nodes)
                if r - w > lo:
                    total += integrate(lambda s: -sing_factor(s) * np.log(r - s),
                                       lo, r - w, breakpoints=brk, spec=spec)
            else:
                total += _log_edge_integral(sing_factor, r, w, +1, spec.gauss_nodes)
                if r + w < hi:
                    total += integrate(lambda s: -sing_factor(s) * np.log(s - r),
                                       r + w, hi, breakpoints=brk, spec=spec)
        else:
            def sing(s):
                return -sing_factor(s) * np.abs(r - s) ** g1 / g1
            if side < 0:
                total += integrate(sing, lo, hi, mu_b=1.0 - gamma, breakpoints=brk, spec=spec)
            else:
                total += integrate(sing, lo, hi, mu_a=1.0 - gamma, breakpoints=brk, spec=spec)
    return total


def _riesz_radial_integral_generic(f, r, s_lo, s_hi, gamma, n, spec, inner_breaks):
    ring_vec = np.vectorize(lambda s: ring_kernel(r, s, gamma, n, spec), otypes=[float])

    def integrand(s):
        return s ** (n - 1) * f(s) * ring_vec(s)

    brk = [t for t in inner_breaks if s_lo < t < s_hi]
    if s_lo < r < s_hi:
        mu = max(0.0, 1.0 - gamma)
        left = integrate(integrand, s_lo, r, mu_b=mu, breakpoints=brk, spec=spec)
        right = integrate(integrand, r, s_hi, mu_a=mu, breakpoints=brk, spec=spec)
        return left + right
    return integrate(integrand, s_lo, s_hi, breakpoints=brk, spec=spec)


def _reflected_grid(grid: np.ndarray) -> np.ndarray:
    """Input grid window united with its reflection through r = 1.

    Downstream Kelvin transforms then never extrapolate.
    """
    lo = min(grid[0], 1.0 / grid[-1])
    hi = max(grid[-1], 1.0 / grid[0])
    dec_in = math.log10(grid[-1] / grid[0])
    dec_out = math.log10(hi / lo)
    pts = max(grid.size, int(round(grid.size * dec_out / max(dec_in, 1e-9))))
    return np.geomspace(lo, hi, pts)


def riesz_potential(f: RadialFunction, gamma: float, n: int,
                    spec: QuadratureSpec | None = None,
                    out_grid: np.ndarray | None = None) -> RadialFunction:
    """Riesz potential of a radial density: the radial profile of I_gamma f.

    u(r) = R(gamma, n) * omega_{n-1} * integral of s^(n-1) f(s) ring(r, s) ds.
    The output tail exponent is min(sigma_f - gamma, n - gamma) for a decaying
    density and n - gamma for a compactly supported one; the coefficient is
    matched at the last grid point.
    """
    spec = spec or DEFAULT_SPEC
    const = riesz_constant(gamma, n)  # validates 0 < gamma < n
    omega = sphere_area(n)

    s_lo_supp, s_hi_supp, has_tail = _support_bounds(f)
    if has_tail and not f.tail.sigma > gamma:
        raise DivergentTail(
            f"tail exponent {f.tail.sigma} must exceed gamma = {gamma} for convergence")

    grid = np.asarray(out_grid, dtype=float) if out_grid is not None else _reflected_grid(f.grid)
    values = np.empty_like(grid)

    if s_lo_supp is None and not has_tail:
        zero = RadialFunction(grid, np.zeros_like(grid), tail=Tail(n - gamma, 0.0))
        return zero

    s_lo = 0.0 if s_lo_supp is None else s_lo_supp
    inner_breaks = [t for t in (s_lo_supp, s_hi_supp, f.r_min, f.r_max) if t]

    for i, r in enumerate(grid):
        s_hi = s_hi_supp if (not has_tail and s_hi_supp is not None) else max(f.r_max, 10.0 * r)
        if n == 3:
            val = _riesz_radial_integral_n3(f, r, s_lo, s_hi, gamma, spec, inner_breaks)
        else:
            val = _riesz_radial_integral_generic(f, r, s_lo, s_hi, gamma, n, spec, inner_breaks)
        if has_tail:
            # analytic remainder with ring ~ s^(gamma-n) beyond the horizon
            sig, c = f.tail.sigma, f.tail.c
            val += c * s_hi ** (gamma - sig) / (sig - gamma)
        values[i] = const * omega * val

    if has_tail:
        sigma_out = min(f.tail.sigma - gamma, n - gamma)
    else:
        sigma_out = n - gamma
    c_out = values[-1] * grid[-1] ** sigma_out
    return RadialFunction(grid, values, tail=Tail(sigma_out, c_out), inner="constant")


def frac_laplacian(u: RadialFunction, alpha: float, n: int, x_radius: float,
                   spec: QuadratureSpec | None = None) -> float:
    """Pointwise fractional Laplacian of a radial function at |x| = x_radius."""
    spec = spec or DEFAULT_SPEC
    return frac_constant(n, alpha) * integrate_pv_symmetric(u, x_radius, alpha, n, spec)


# ---------------------------------------------------------------------------
# ball kernels


def green_inner(X: float, alpha: float, n: int) -> float:
    """integral of b^(alpha/2-1) (1+b)^(-n/2) db over (0, X).

    Equals the incomplete Beta function B(X/(1+X); alpha/2, (n-alpha)/2).
    """
    if not 0.0 < alpha < min(2.0, float(n)):
        raise OutOfRange("alpha", f"need 0 < alpha < min(2, n), got {alpha}")
    if X <= 0.0:
        return 0.0
    aa, bb = alpha / 2.0, (n - alpha) / 2.0
    if math.isinf(X):
        return float(_beta(aa, bb))
    x = X / (1.0 + X)
    return float(_beta(aa, bb) * _betainc(aa, bb, x))


def _chord(x_radius: float, y_radius: float, cos_angle: float) -> float:
    if not -1.0 <= cos_angle <= 1.0:
        raise OutOfRange("cos_angle", f"must lie in [-1, 1], got {cos_angle}")
    d2 = x_radius * x_radius + y_radius * y_radius - 2.0 * x_radius * y_radius * cos_angle
    return math.sqrt(max(d2, 0.0))


def green_ball(x_radius: float, y_radius: float, cos_angle: float,
               params: BallKernelParams, spec: QuadratureSpec | None = None) -> float:
    """Green function of the fractional Laplacian on the ball of radius R.

    Zero whenever either point lies outside the ball; +inf (a tagged value,
    not an error) at coincident interior points, so representation-identity
    quadratures can excise the diagonal as a singular panel.
    """
    R, alpha, n = params.R, params.alpha, params.n
    if x_radius < 0 or y_radius < 0:
        raise OutOfRange("radius", "radii must be >= 0")
    if x_radius >= R or y_radius >= R:
        return 0.0
    dist = _chord(x_radius, y_radius, cos_angle)
    if dist == 0.0:
        return math.inf
    s = dist * dist / (R * R)
    t = (1.0 - (x_radius / R) ** 2) * (1.0 - (y_radius / R) ** 2)
    return green_constant(n, alpha) * dist ** (alpha - n) * green_inner(t / s, alpha, n)


def poisson_ball(x_radius: float, y_radius: float, cos_angle: float,
                 params: BallKernelParams) -> float:
    """Poisson kernel of the fractional Laplacian on the ball of radius R.

    Defined for |x| < R; zero for |y| < R (the kernel charges only the
    exterior), +inf on |y| = R.
    """
    R, alpha, n = params.R, params.alpha, params.n
    if not 0 <= x_radius < R:
        raise XOutsideBall(f"need |x| < R = {R}, got {x_radius}")
    if y_radius < R:
        return 0.0
    if y_radius == R:
        return math.inf
    dist = _chord(x_radius, y_radius, cos_angle)
    ratio = (R * R - x_radius * x_radius) / (y_radius * y_radius - R * R)
    return poisson_constant(n, alpha) * ratio ** (alpha / 2.0) * dist ** (-n)


# ---------------------------------------------------------------------------
# Kelvin transform


def kelvin(u: RadialFunction, lam: float, exponent_sigma: float) -> RadialFunction:
    """Kelvin transform u_lam(r) = (lam/r)^sigma u(lam^2 / r).

    The output grid is the exact image lam^2/grid of the input grid, so the
    transform introduces no interpolation of its own and composing it with
    itself recovers the input values to roundoff.
    """
    if not lam > 0:
        raise OutOfRange("lambda", f"must be > 0, got {lam}")
    sig = float(exponent_sigma)
    new_grid = (lam * lam / u.grid)[::-1]
    new_values = (lam / new_grid) ** sig * u.values[::-1]

    # tail of the image comes from the inner policy of the source
    if u.inner == "constant":
        tail = Tail(sig, lam ** sig * float(u.values[0]))
    else:
        sig_in = u._inner_sigma()
        c = float(u.values[0]) * lam ** (sig - 2.0 * sig_in) * u.r_min ** sig_in
        tail = Tail(sig - sig_in, c)
    inner = "power" if u.tail is not None else "constant"
    if inner == "power" and (new_values[0] <= 0 or new_values[1] <= 0):
        inner = "constant"
    return RadialFunction(new_grid, new_values, tail=tail, inner=inner)
