"""Nonlocal averages, decay-exponent formulas, and empirical decay fitting.

The nonlocal average A_alpha[u](R) = integral over (R, inf) of
R^alpha / (r (r^2 - R^2)^(alpha/2)) * ubar(r) dr plays the role that the
plain spherical average plays for the classical Laplacian.  The substitution
t = R/r maps it onto (0, 1) with fixed algebraic endpoints
t^(alpha-1) (1-t^2)^(-alpha/2), so one quadrature path covers every order
and tail.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import ProblemParams, QuadratureSpec, RadialFunction, validate
from .errors import DivergentTail, NonPositiveValues, OutOfRange, PQNotSupercritical
from .quad import DEFAULT_SPEC, integrate

__all__ = [
    "DecayReport",
    "LocalDecayReport",
    "nonlocal_average",
    "decay_exponents",
    "fit_decay",
    "local_decay_check",
]


def nonlocal_average(u: RadialFunction, alpha: float, R: float,
                     spec: QuadratureSpec | None = None) -> float:
    """Weighted tail average of u beyond radius R (the fractional mean).

    Requires a tail record with a non-growing exponent; the weight itself
    decays like r^(-1-alpha), so bounded tails (sigma = 0) still converge.
    """
    spec = spec or DEFAULT_SPEC
    if not 0.0 < alpha < 2.0:
        raise OutOfRange("alpha", f"need 0 < alpha < 2, got {alpha}")
    if not R > 0:
        raise OutOfRange("R", f"need R > 0, got {R}")
    if u.tail is None:
        raise DivergentTail("a tail record is required for the average over (R, inf)")
    if u.tail.c != 0.0 and u.tail.sigma < 0.0:
        raise DivergentTail(f"growing tail (sigma={u.tail.sigma}) diverges")

    def f(t):
        return t ** (alpha - 1.0) * (1.0 - t * t) ** (-alpha / 2.0) * u(R / t)

    # breakpoints where R/t crosses the grid window (tail / interpolation kinks)
    brk = [t for t in (R / u.r_max, R / u.r_min) if 0.0 < t < 1.0]
    return integrate(f, 0.0, 1.0, mu_a=1.0 - alpha, mu_b=alpha / 2.0,
                     breakpoints=brk, spec=spec)


def decay_exponents(params: ProblemParams) -> tuple[float, float]:
    """Theoretical decay exponents (sigma_u, sigma_v) of the upper bounds.

    sigma_u = (2k + alpha + a + p(2l + beta + b)) / (pq - 1) and the
    symmetric expression for sigma_v; defined only for pq > 1.
    """
    prm = validate(params)
    if not prm.p * prm.q > 1.0:
        raise PQNotSupercritical(f"need pq > 1, got pq = {prm.p * prm.q}")
    du = 2 * prm.k + prm.alpha + prm.a
    dv = 2 * prm.l + prm.beta + prm.b
    den = prm.p * prm.q - 1.0
    return (du + prm.p * dv) / den, (dv + prm.q * du) / den


@dataclass(frozen=True)
class DecayReport:
    """Least-squares decay exponent over a window, with the log-log residual."""

    fitted_exponent: float
    theoretical_exponent: float
    window: tuple[float, float]
    residual: float

    def to_json(self) -> str:
        return json.dumps({
            "fitted": self.fitted_exponent,
            "theoretical": self.theoretical_exponent,
            "window": [self.window[0], self.window[1]],
            "residual": self.residual,
        })


def fit_decay(u: RadialFunction, window: tuple[float, float],
              theoretical_exponent: float = math.nan) -> DecayReport:
    """Fit u ~ c r^(-sigma) on a window by least squares in log-log."""
    lo, hi = float(window[0]), float(window[1])
    if not (u.r_min <= lo < hi <= u.r_max):
        raise OutOfRange("window", f"[{lo}, {hi}] not inside grid [{u.r_min}, {u.r_max}]")
    mask = (u.grid >= lo) & (u.grid <= hi)
    if np.count_nonzero(mask) < 8:
        raise OutOfRange("window", "need at least 8 grid points in the window")
    r = u.grid[mask]
    v = u.values[mask]
    if np.any(v <= 0):
        raise NonPositiveValues("decay fit needs positive values in the window")
    x = np.log(r)
    y = np.log(v)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.max(np.abs(y - (slope * x + intercept))))
    return DecayReport(fitted_exponent=-float(slope),
                       theoretical_exponent=theoretical_exponent,
                       window=(lo, hi), residual=residual)


@dataclass(frozen=True)
class LocalDecayReport:
    """Compensated products ubar(R) R^sigma along a radius list.

    Boundedness of the products is the claim under test.  ``exploratory``
    is set when k = l = 0, where only the nonlocal-average form of the bound
    is established; results there are informational, never a hard failure.
    """

    R_list: np.ndarray
    sigma_u: float
    sigma_v: float
    products_u: np.ndarray
    products_v: np.ndarray
    navg_products_u: np.ndarray | None
    navg_products_v: np.ndarray | None
    exploratory: bool
    max_product: float = field(default=math.nan)

    def to_dict(self) -> dict:
        d = {
            "R": list(self.R_list),
            "sigma_u": self.sigma_u,
            "sigma_v": self.sigma_v,
            "products_u": list(self.products_u),
            "products_v": list(self.products_v),
            "max_product": self.max_product,
            "exploratory": self.exploratory,
        }
        if self.navg_products_u is not None:
            d["navg_products_u"] = list(self.navg_products_u)
            d["navg_products_v"] = list(self.navg_products_v)
        return d


def local_decay_check(u: RadialFunction, v: RadialFunction, params: ProblemParams,
                      R_list, spec: QuadratureSpec | None = None,
                      include_nonlocal: bool = True) -> LocalDecayReport:
    """Evaluate ubar(R) R^sigma_u and vbar(R) R^sigma_v over R_list.

    Optionally also compensates the nonlocal averages, which is the form the
    decay estimate actually controls in the purely fractional case.
    """
    spec = spec or DEFAULT_SPEC
    prm = validate(params)
    if prm.p < 1.0 or prm.q < 1.0:
        raise OutOfRange("p", "the decay estimates assume p, q >= 1")
    sig_u, sig_v = decay_exponents(prm)
    R_arr = np.asarray(list(R_list), dtype=float)
    pu = np.asarray([u(R) * R ** sig_u for R in R_arr])
    pv = np.asarray([v(R) * R ** sig_v for R in R_arr])
    nu = nv = None
    if include_nonlocal:
        nu = np.asarray([nonlocal_average(u, prm.alpha, R, spec) * R ** sig_u for R in R_arr])
        nv = np.asarray([nonlocal_average(v, prm.beta, R, spec) * R ** sig_v for R in R_arr])
    pools = [pu, pv] + ([nu, nv] if include_nonlocal else [])
    return LocalDecayReport(
        R_list=R_arr, sigma_u=sig_u, sigma_v=sig_v,
        products_u=pu, products_v=pv,
        navg_products_u=nu, navg_products_v=nv,
        exploratory=(prm.k == 0 and prm.l == 0),
        max_product=float(max(np.max(arr) for arr in pools)),
    )
