"""Numerical verification of the three concrete lemmas.

* the sign trichotomy of the derivative kernel integral
  I(gamma, n, r, R) = integral over |y| = R of x.(x-y)/|x-y|^(n-gamma+2),
  evaluated by two independent routes (direct polar reduction, and the
  law-of-sines chord parametrization valid for R > r = 1);
* the monotonicity counterexample: the Riesz potential of an annulus bump
  is strictly increasing inside the unit ball although its fractional
  Laplacian is nonnegative everywhere;
* the ball representation identity at the center,
  u(0) = (Green term over B_R) + (Poisson term over the exterior).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import QuadratureSpec, RadialFunction, Tail, radial_from_callable
from .errors import BumpInvalid, OutOfRange, Singular
from .kernels import (
    _support_bounds,
    green_inner,
    green_constant,
    poisson_constant,
    riesz_constant,
    riesz_potential,
    frac_laplacian,
    sphere_area,
)
from .averages import nonlocal_average
from .quad import DEFAULT_SPEC, integrate

__all__ = [
    "SignLemmaResult",
    "CounterexampleReport",
    "RepresentationIdentity",
    "sign_integral_surface",
    "sign_integral_theta",
    "sign_lemma_check",
    "smooth_bump",
    "annulus_bump_radial",
    "build_counterexample",
    "representation_identity",
]


def sign_integral_surface(gamma: float, n: int, r: float, R: float,
                          spec: QuadratureSpec | None = None) -> float:
    """Surface integral of x.(x-y)/|x-y|^(n-gamma+2) over |y| = R at |x| = r.

    Reduced to one polar angle: x.(x-y) = r^2 - rR cos(theta).  Sign facts:
    strictly positive for R < r (the integrand is pointwise positive there),
    and for R > r the sign of gamma - 2.
    """
    spec = spec or DEFAULT_SPEC
    if n < 2:
        raise OutOfRange("n", f"need n >= 2, got {n}")
    if r <= 0 or R <= 0:
        raise OutOfRange("r", "radii must be > 0")
    if r == R:
        raise Singular("the kernel is non-integrable on r = R")
    if not 0.0 < gamma < n + 2.0:
        raise OutOfRange("gamma", f"need 0 < gamma < n + 2, got {gamma}")

    expo = -(n - gamma + 2.0) / 2.0
    half = (n - 3) / 2.0
    mu = -half

    def f(c):
        chord2 = r * r + R * R - 2.0 * r * R * c
        return (r * r - r * R * c) * chord2 ** expo * (1.0 - c * c) ** half

    if n == 3:
        val = integrate(f, -1.0, 1.0, spec=spec)
    else:
        val = integrate(f, -1.0, 1.0, mu_a=mu, mu_b=mu, spec=spec)
    return sphere_area(n - 1) * R ** (n - 1) * val


def sign_integral_theta(gamma: float, n: int, R: float,
                        spec: QuadratureSpec | None = None) -> float:
    """The chord-parametrized form of the same integral, normalized to r = 1.

    Valid for R > 1.  With delta(theta) from sin(delta) = sin(theta)/R the
    two chords through x = e_n at inclination theta have lengths
    |PC| = R cos(delta) - cos(theta) and |PD| = R cos(delta) + cos(theta);
    the bracket [(|PC|/|PD|)^(3-gamma) - (Rcos(delta)-cos(theta))/(Rcos(delta)+cos(theta))]
    vanishes identically at gamma = 2 and carries the trichotomy otherwise.
    Returns the same value as the surface form (not merely proportional).
    """
    spec = spec or DEFAULT_SPEC
    if n < 2:
        raise OutOfRange("n", f"need n >= 2, got {n}")
    if not R > 1.0:
        raise OutOfRange("R", f"the normalized form needs R > 1, got {R}")
    if not 0.0 < gamma < n + 2.0:
        raise OutOfRange("gamma", f"need 0 < gamma < n + 2, got {gamma}")

    def f(theta):
        st = np.sin(theta)
        ct = np.cos(theta)
        cd = np.sqrt(1.0 - (st / R) ** 2)
        pc = R * cd - ct
        pd = R * cd + ct
        bracket = (pc / pd) ** (3.0 - gamma) - (R * cd - ct) / (R * cd + ct)
        return ct * st ** (n - 2) * (R * cd + ct) / (pc ** (3.0 - gamma) * R * cd) * bracket

    val = integrate(f, 0.0, math.pi / 2.0, spec=spec)
    return sphere_area(n - 1) * R * val


@dataclass(frozen=True)
class SignLemmaResult:
    """Both evaluations of the sign integral plus the expected sign."""

    gamma: float
    n: int
    r: float
    R: float
    value_surface: float
    value_theta: float | None
    sign_expected: str

    @property
    def sign(self) -> str:
        scale = abs(sign_integral_surface(3.0, self.n, self.r, self.R))
        if abs(self.value_surface) <= 1e-8 * max(scale, 1e-300):
            return "zero"
        return "positive" if self.value_surface > 0 else "negative"


def sign_lemma_check(gamma: float, n: int, r: float, R: float,
                     spec: QuadratureSpec | None = None) -> SignLemmaResult:
    """Evaluate both routes and attach the trichotomy prediction.

    The theta route exists only for R > r; by scaling it is evaluated at
    (1, R/r) and multiplied by r^(gamma-1).
    """
    surf = sign_integral_surface(gamma, n, r, R, spec)
    theta = None
    if R > r:
        theta = r ** (gamma - 1.0) * sign_integral_theta(gamma, n, R / r, spec)
    if R < r:
        expected = "positive"
    elif gamma > 2.0:
        expected = "positive"
    elif gamma == 2.0:
        expected = "zero"
    else:
        expected = "negative"
    return SignLemmaResult(gamma=gamma, n=n, r=r, R=R,
                           value_surface=surf, value_theta=theta,
                           sign_expected=expected)


# ---------------------------------------------------------------------------
# the monotonicity counterexample


def smooth_bump(s):
    """The standard C-infinity bump exp(-1/((s-1)(2-s))) on (1, 2), else 0."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = (s > 1.0) & (s < 2.0)
    si = s[inside]
    out[inside] = np.exp(-1.0 / ((si - 1.0) * (2.0 - si)))
    return out


def annulus_bump_radial(profile=None, r_min: float = 1e-3, r_max: float = 1e3,
                        points: int = 512, support_points: int = 240) -> RadialFunction:
    """Sample an annulus profile on a log grid refined across (1, 2)."""
    profile = profile or smooth_bump
    base = np.geomspace(r_min, r_max, points)
    cluster = np.linspace(1.0, 2.0, support_points)
    grid = np.unique(np.concatenate([base, cluster]))
    return radial_from_callable(profile, grid, tail=Tail(math.inf, 0.0))


def _validate_bump(profile) -> float:
    inside = np.linspace(1.0 + 1e-4, 2.0 - 1e-4, 201)
    outside = np.concatenate([np.linspace(0.2, 1.0, 41), np.linspace(2.0, 3.0, 41)])
    vin = np.asarray(profile(inside), dtype=float)
    vout = np.asarray(profile(outside), dtype=float)
    if np.any(vin < 0):
        raise BumpInvalid("profile must be nonnegative on (1, 2)")
    if not np.max(vin) > 0:
        raise BumpInvalid("profile must not vanish identically")
    if np.any(vout != 0):
        raise BumpInvalid("profile must vanish outside (1, 2)")
    return float(np.max(vin))


@dataclass(frozen=True)
class CounterexampleReport:
    """Riesz potential of an annulus bump, with the monotonicity evidence.

    ``min_forward_difference`` is taken over consecutive grid radii in the
    window; strict positivity above the noise floor is the claim.
    """

    u: RadialFunction
    alpha: float
    n: int
    window: tuple[float, float]
    min_forward_difference: float
    f_max: float
    flap_samples: tuple[tuple[float, float, float], ...]  # (r, flap value, f value)
    residual_of_flap_vs_f: float
    flap_min: float

    @property
    def f_nonneg(self) -> bool:
        return self.flap_min >= -1e-3 * self.f_max

    @property
    def strictly_increasing(self) -> bool:
        umax = float(np.max(self.u.values))
        return self.min_forward_difference > 1e-10 * umax

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "n": self.n,
            "window": list(self.window),
            "min_forward_difference": self.min_forward_difference,
            "strictly_increasing": self.strictly_increasing,
            "residual_of_flap_vs_f": self.residual_of_flap_vs_f,
            "flap_min": self.flap_min,
            "f_nonneg": self.f_nonneg,
            "f_max": self.f_max,
            "flap_samples": [list(t) for t in self.flap_samples],
        }


DEFAULT_FLAP_SAMPLE_RADII = (0.15, 0.3, 0.5, 0.75, 1.1, 1.3, 1.5, 1.7, 1.9, 2.2, 2.6, 3.0)


def build_counterexample(alpha: float, n: int, bump=None,
                         spec: QuadratureSpec | None = None,
                         window: tuple[float, float] = (0.05, 0.95),
                         flap_radii=DEFAULT_FLAP_SAMPLE_RADII) -> CounterexampleReport:
    """Construct the increasing super-harmonic example and audit it.

    u is the Riesz potential of order alpha of a nonnegative bump supported
    in the annulus 1 < |y| < 2; the report verifies positivity, recovers the
    source through the fractional Laplacian, and certifies strictly positive
    forward differences of u on the window inside the unit ball.
    """
    spec = spec or DEFAULT_SPEC
    if not 0.0 < alpha < min(2.0, float(n)):
        raise OutOfRange("alpha", f"need 0 < alpha < min(2, n), got {alpha}")
    profile = bump or smooth_bump
    f_max = _validate_bump(profile)
    f_rf = annulus_bump_radial(profile)
    u = riesz_potential(f_rf, alpha, n, spec)
    if np.any(u.values <= 0):
        raise BumpInvalid("potential of the bump should be strictly positive")

    mask = (u.grid > window[0]) & (u.grid < window[1])
    diffs = np.diff(u.values[mask])
    min_fd = float(np.min(diffs)) if diffs.size else math.nan

    samples = []
    for r in flap_radii:
        val = frac_laplacian(u, alpha, n, r, spec)
        samples.append((float(r), float(val), float(profile(np.asarray([r]))[0])))
    residual = max(abs(v - fv) for _, v, fv in samples)
    flap_min = min(v for _, v, _ in samples)

    return CounterexampleReport(
        u=u, alpha=alpha, n=n, window=window,
        min_forward_difference=min_fd, f_max=f_max,
        flap_samples=tuple(samples),
        residual_of_flap_vs_f=float(residual),
        flap_min=float(flap_min),
    )


# ---------------------------------------------------------------------------
# the representation identity at the center of the ball


@dataclass(frozen=True)
class RepresentationIdentity:
    """u(0) against the Green + Poisson split at ball radius R."""

    lhs: float
    rhs_green: float
    rhs_poisson: float
    R: float
    alpha: float
    n: int

    @property
    def total(self) -> float:
        return self.rhs_green + self.rhs_poisson

    @property
    def relative_gap(self) -> float:
        scale = max(abs(self.lhs), 1e-300)
        return abs(self.total - self.lhs) / scale

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs_green": self.rhs_green,
            "rhs_poisson": self.rhs_poisson,
            "total": self.total,
            "relative_gap": self.relative_gap,
            "R": self.R, "alpha": self.alpha, "n": self.n,
        }


def representation_identity(f: RadialFunction, alpha: float, n: int, R: float,
                            spec: QuadratureSpec | None = None,
                            potential: RadialFunction | None = None) -> RepresentationIdentity:
    """Check u(0) = Green term + Poisson term for u the potential of f.

    The left side is the direct radial formula for the potential at the
    origin; the Green term integrates the source against the ball kernel at
    x = 0; the Poisson term is the nonlocal average of u with the exterior
    constant.  All three run through independent quadratures.  Pass
    ``potential`` to reuse a precomputed u across several ball radii.
    """
    spec = spec or DEFAULT_SPEC
    if not R > 0:
        raise OutOfRange("R", f"need R > 0, got {R}")
    omega = sphere_area(n)
    s_lo, s_hi, has_tail = _support_bounds(f)
    if s_lo is None and not has_tail:
        return RepresentationIdentity(0.0, 0.0, 0.0, R, alpha, n)
    s_lo = s_lo if s_lo is not None else f.r_min
    s_hi = f.r_max if has_tail else (s_hi if s_hi is not None else f.r_max)

    # u(0) = R_const * omega * int s^(alpha-1) f(s) ds, tail in closed form
    lhs = integrate(lambda s: s ** (alpha - 1.0) * f(s), s_lo, s_hi,
                    mu_a=(1.0 - alpha if s_lo == 0.0 else 0.0), spec=spec)
    if has_tail:
        sig, c = f.tail.sigma, f.tail.c
        lhs += c * s_hi ** (alpha - sig) / (sig - alpha)
    lhs *= riesz_constant(alpha, n) * omega

    def green_integrand(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        inner = np.array([green_inner(R * R / rr ** 2 - 1.0, alpha, n) for rr in r])
        return r ** (alpha - 1.0) * inner * f(r)

    rhs_green = 0.0
    glo, ghi = min(s_lo, R), min(s_hi, R)
    if ghi > glo:
        rhs_green = omega * green_constant(n, alpha) * integrate(
            green_integrand, glo, ghi,
            mu_a=(1.0 - alpha if glo == 0.0 else 0.0), spec=spec)

    u = potential if potential is not None else riesz_potential(f, alpha, n, spec)
    rhs_poisson = omega * poisson_constant(n, alpha) * nonlocal_average(u, alpha, R, spec)

    return RepresentationIdentity(lhs=float(lhs), rhs_green=float(rhs_green),
                                  rhs_poisson=float(rhs_poisson), R=R, alpha=alpha, n=n)
