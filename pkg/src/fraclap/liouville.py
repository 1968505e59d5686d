"""Region classification, bootstrap exponent recursion, Kelvin defects, Picard dynamics.

The classifier implements the nonexistence regions verbatim; the high-order
branch (max(2k+alpha, 2l+beta) >= n, n >= 2) is a verdict by citation with
no computation attached.  The bootstrap recursion iterates the lower-bound
exponents mu_{u,i+1} = p mu_{v,i} - (a+2k+alpha), mu_{v,i+1} = q mu_{u,i} -
(b+2l+beta) from the scaling-spheres seed (n-2k-alpha)/2, (n-2l-beta)/2 and
classifies the even-subsequence limit.  Picard iteration runs the integral
system as a fixed-point map; its outcomes are exploratory observations, not
theorems.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ProblemParams, QuadratureSpec, RadialFunction, Tail, validate
from .errors import DivergentConvolution, NotSubcritical, OutOfRange
from .averages import fit_decay
from .kernels import kelvin, riesz_potential
from .quad import DEFAULT_SPEC

__all__ = [
    "RegionVerdict",
    "ExponentSequence",
    "PicardTrajectory",
    "RegionMap",
    "VERDICTS",
    "classify",
    "bootstrap",
    "kelvin_defect",
    "picard_iterate",
    "region_map",
]

VERDICTS = (
    "Nonexistence_Thm12_i",
    "Nonexistence_Thm12_ii",
    "Nonexistence_Thm12_iii",
    "Nonexistence_Thm13_subcritical",
    "Nonexistence_Thm13_highorder",
    "CriticalPair_excluded",
    "OutsideTheorems",
)

_EQ_TOL = 1e-12


@dataclass(frozen=True)
class RegionVerdict:
    """Exactly one verdict plus the checked inequality with numbers filled in."""

    verdict: str
    reason: str

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "reason": self.reason}


def _close(x: float, y: float) -> bool:
    return math.isclose(x, y, rel_tol=_EQ_TOL, abs_tol=_EQ_TOL)


def classify(params: ProblemParams) -> RegionVerdict:
    """Place a parameter point in the nonexistence regions.

    Checks run in a fixed order (high-order citation, p = q = 1, the two
    decay-estimate inequalities, the subcritical box with its critical pair
    excluded); overlapping conditions all imply nonexistence, so the order
    only affects the reason text, never the truth of the verdict.
    """
    prm = validate(params)
    ou, ov = prm.order_u, prm.order_v
    p, q = prm.p, prm.q

    if prm.high_order and prm.n >= 2:
        return RegionVerdict(
            "Nonexistence_Thm13_highorder",
            f"max(2k+alpha, 2l+beta) = {max(ou, ov):.6g} >= n = {prm.n} with n >= 2 "
            "(verdict by citation; no computation attached)")

    if p >= 1.0 and q >= 1.0:
        if _close(p, 1.0) and _close(q, 1.0):
            return RegionVerdict("Nonexistence_Thm12_i", "p = q = 1")
        pq = p * q
        if pq > 1.0:
            lhs_u = (ou + prm.a + p * (ov + prm.b)) / (pq - 1.0)
            if lhs_u > prm.n - ou:
                return RegionVerdict(
                    "Nonexistence_Thm12_ii",
                    f"pq = {pq:.6g} > 1 and (2k+alpha+a+p(2l+beta+b))/(pq-1) = "
                    f"{lhs_u:.6g} > n-2k-alpha = {prm.n - ou:.6g}")
            lhs_v = (ov + prm.b + q * (ou + prm.a)) / (pq - 1.0)
            if lhs_v > prm.n - ov:
                return RegionVerdict(
                    "Nonexistence_Thm12_iii",
                    f"pq = {pq:.6g} > 1 and (2l+beta+b+q(2k+alpha+a))/(pq-1) = "
                    f"{lhs_v:.6g} > n-2l-beta = {prm.n - ov:.6g}")

    if prm.subcritical_order and p > 0.0 and q > 0.0:
        pc, qc = prm.critical_p, prm.critical_q
        in_box = (p < pc or _close(p, pc)) and (q < qc or _close(q, qc))
        if in_box:
            if _close(p, pc) and _close(q, qc):
                return RegionVerdict(
                    "CriticalPair_excluded",
                    f"(p, q) = ({p:.6g}, {q:.6g}) equals the critical pair "
                    f"({pc:.6g}, {qc:.6g}), which the subcritical theorem excludes")
            return RegionVerdict(
                "Nonexistence_Thm13_subcritical",
                f"0 < p = {p:.6g} <= {pc:.6g} and 0 < q = {q:.6g} <= {qc:.6g} "
                f"with (p, q) != ({pc:.6g}, {qc:.6g})")

    return RegionVerdict("OutsideTheorems",
                         f"(p, q) = ({p:.6g}, {q:.6g}) matches no implemented region")


# ---------------------------------------------------------------------------
# bootstrap exponent recursion

LIMIT_CLASSES = (
    "diverges_to_minus_infinity",
    "diverges_to_plus_infinity",
    "arithmetic_decrease",
    "converges",
    "constant",
)


@dataclass(frozen=True)
class ExponentSequence:
    """Iterates of the lower-bound exponents with the even-step limit class.

    ``tau`` = n + 2k + alpha + 2a - p(n - 2l - beta).  For pq = 1 the even
    subsequence decreases arithmetically by ``decrement_u`` (resp. v); for
    pq != 1 the fixed point of the two-step recursion decides convergence or
    divergence.
    """

    mu_u: np.ndarray
    mu_v: np.ndarray
    limit_class: str
    limit_u: float | None
    limit_v: float | None
    tau: float
    decrement_u: float | None = None
    decrement_v: float | None = None

    def to_dict(self) -> dict:
        return {
            "mu_u": list(self.mu_u),
            "mu_v": list(self.mu_v),
            "limit_class": self.limit_class,
            "limit_u": self.limit_u,
            "limit_v": self.limit_v,
            "tau": self.tau,
            "decrement_u": self.decrement_u,
            "decrement_v": self.decrement_v,
        }


def bootstrap(params: ProblemParams, i_max: int) -> ExponentSequence:
    """Run the exponent recursion for i = 0 .. i_max and classify the limit."""
    prm = validate(params)
    if not prm.subcritical_order:
        raise NotSubcritical(
            f"orders (2k+alpha, 2l+beta) = ({prm.order_u:.6g}, {prm.order_v:.6g}) "
            f"must both lie below n = {prm.n}")
    if i_max < 2:
        raise OutOfRange("i_max", f"need i_max >= 2, got {i_max}")

    cu = prm.a + 2 * prm.k + prm.alpha
    cv = prm.b + 2 * prm.l + prm.beta
    p, q = prm.p, prm.q
    mu_u = np.empty(i_max + 1)
    mu_v = np.empty(i_max + 1)
    mu_u[0] = (prm.n - 2 * prm.k - prm.alpha) / 2.0
    mu_v[0] = (prm.n - 2 * prm.l - prm.beta) / 2.0
    for i in range(i_max):
        mu_u[i + 1] = p * mu_v[i] - cu
        mu_v[i + 1] = q * mu_u[i] - cv

    pq = p * q
    tau = prm.n + 2 * prm.k + prm.alpha + 2 * prm.a - p * (prm.n - 2 * prm.l - prm.beta)
    dec_u = p * cv + cu   # even-step decrement when pq = 1
    dec_v = q * cu + cv

    if _close(pq, 1.0):
        return ExponentSequence(mu_u, mu_v, "arithmetic_decrease", None, None,
                                tau, decrement_u=dec_u, decrement_v=dec_v)
    star_u = (p * cv + cu) / (pq - 1.0)
    star_v = (q * cu + cv) / (pq - 1.0)
    if pq < 1.0:
        return ExponentSequence(mu_u, mu_v, "converges", star_u, star_v, tau)
    if _close(mu_u[0], star_u) and _close(mu_v[0], star_v):
        return ExponentSequence(mu_u, mu_v, "constant", star_u, star_v, tau)
    if mu_u[0] < star_u:
        return ExponentSequence(mu_u, mu_v, "diverges_to_minus_infinity",
                                None, None, tau)
    return ExponentSequence(mu_u, mu_v, "diverges_to_plus_infinity", None, None, tau)


# ---------------------------------------------------------------------------
# Kelvin defect diagnostics


def kelvin_defect(u: RadialFunction, lam: float, sigma: float,
                  points: int = 256, tolerance: float | None = None):
    """Defect omega(r) = (lam/r)^sigma u(lam^2/r) - u(r) on (0, lam).

    Returns the defect as a RadialFunction together with the list of grid
    intervals where it dips below -tolerance.  A diagnostic only: an empty
    negative set for a sample function is not evidence about general
    solutions.
    """
    if not lam > 0:
        raise OutOfRange("lambda", f"must be > 0, got {lam}")
    u_lam = kelvin(u, lam, sigma)
    lo = max(u.r_min, lam * lam / u.r_max) * (1.0 + 1e-12)
    hi = lam * (1.0 - 1e-12)
    if not lo < hi:
        raise OutOfRange("lambda", "grid window cannot reach below lambda")
    grid = np.geomspace(lo, hi, points)
    omega_vals = u_lam(grid) - u(grid)
    omega = RadialFunction(grid, omega_vals)

    if tolerance is None:
        tolerance = 1e-10 * float(np.max(np.abs(u.values)))
    negative = omega_vals < -tolerance
    intervals = []
    i = 0
    while i < points:
        if negative[i]:
            j = i
            while j + 1 < points and negative[j + 1]:
                j += 1
            intervals.append((float(grid[i]), float(grid[j])))
            i = j + 1
        else:
            i += 1
    return omega, intervals


# ---------------------------------------------------------------------------
# Picard iteration on the integral system

COLLAPSE_FACTOR = 1e-8
BLOWUP_FACTOR = 1e8
STATIONARY_RESIDUAL = 1e-3
TAIL_REFIT_RESIDUAL = 0.2


@dataclass(frozen=True)
class PicardTrajectory:
    """Norm history of the fixed-point iteration, with a coarse outcome label.

    Outcomes are exploratory: nothing is proved about this dynamic, and the
    thresholds are artifact choices.
    """

    iterates: tuple
    sup_norms: tuple
    residuals: tuple
    outcome: str
    warnings: tuple = ()
    exploratory: bool = True

    def to_json(self) -> str:
        return json.dumps({
            "schema": 1,
            "sup_norms": list(self.sup_norms),
            "residuals": list(self.residuals),
            "outcome": self.outcome,
            "warnings": list(self.warnings),
            "exploratory": self.exploratory,
        })


def _weighted_power(g: RadialFunction, weight_exp: float, power: float) -> RadialFunction:
    """s^weight_exp * g(s)^power as a RadialFunction on g's grid."""
    vals = g.grid ** weight_exp * np.maximum(g.values, 0.0) ** power
    tail = None
    if g.tail is not None:
        c = 0.0 if g.tail.c == 0.0 else max(g.tail.c, 0.0) ** power
        tail = Tail(power * g.tail.sigma - weight_exp, c)
    return RadialFunction(g.grid, vals, tail=tail, inner="constant")


def _refit_tail(u: RadialFunction, warnings_out: list) -> RadialFunction:
    lo = u.r_max / 10.0
    try:
        report = fit_decay(u, (lo, u.r_max))
    except Exception as exc:  # nonpositive tail values etc.
        warnings_out.append(f"tail refit failed: {exc}")
        return None
    if report.residual > TAIL_REFIT_RESIDUAL:
        warnings_out.append(
            f"tail refit residual {report.residual:.3g} exceeds {TAIL_REFIT_RESIDUAL}")
        return None
    sig = report.fitted_exponent
    c = float(u.values[-1]) * u.r_max ** sig
    return u.with_tail(Tail(sig, c))


def picard_iterate(params: ProblemParams, u0: RadialFunction, v0: RadialFunction,
                   steps: int, spec: QuadratureSpec | None = None,
                   keep_iterates: bool = True) -> PicardTrajectory:
    """Iterate the integral system from (u0, v0).

    u_{m+1} = I_{2k+alpha}(|.|^a v_m^p), v_{m+1} = I_{2l+beta}(|.|^b u_m^q),
    on the fixed grid of the initial pair.  Tails are refit after every step
    to keep the convolutions convergent; a failed refit stops the run.
    """
    spec = spec or DEFAULT_SPEC
    prm = validate(params)
    if not prm.subcritical_order:
        raise NotSubcritical("the integral system needs 2k+alpha < n and 2l+beta < n")
    if steps < 1:
        raise OutOfRange("steps", f"need steps >= 1, got {steps}")
    if np.any(u0.values < 0) or np.any(v0.values < 0):
        raise OutOfRange("u0", "initial iterates must be nonnegative")

    gamma_u, gamma_v = prm.order_u, prm.order_v
    u, v = u0, v0
    sup0 = max(float(np.max(u0.values)), float(np.max(v0.values)), 1e-300)
    sup_norms = [max(float(np.max(u.values)), float(np.max(v.values)))]
    residuals = []
    iterates = [(u, v)] if keep_iterates else []
    warn_log: list = []
    outcome = "max_iters"

    for _ in range(steps):
        wu = _weighted_power(v, prm.a, prm.p)
        wv = _weighted_power(u, prm.b, prm.q)
        for w, gam, label in ((wu, gamma_u, "u"), (wv, gamma_v, "v")):
            if w.tail is not None and w.tail.c != 0.0 and not w.tail.sigma > gam:
                raise DivergentConvolution(
                    f"source tail exponent {w.tail.sigma:.6g} for {label}-update "
                    f"must exceed {gam:.6g}")
        u_next = riesz_potential(wu, gamma_u, prm.n, spec, out_grid=u0.grid)
        v_next = riesz_potential(wv, gamma_v, prm.n, spec, out_grid=v0.grid)

        res_u = float(np.max(np.abs(u_next.values - u.values))) / max(float(np.max(np.abs(u.values))), 1e-300)
        res_v = float(np.max(np.abs(v_next.values - v.values))) / max(float(np.max(np.abs(v.values))), 1e-300)
        residuals.append(max(res_u, res_v))

        refit_u = _refit_tail(u_next, warn_log)
        refit_v = _refit_tail(v_next, warn_log)
        if refit_u is None or refit_v is None:
            u, v = u_next, v_next
            sup_norms.append(max(float(np.max(u.values)), float(np.max(v.values))))
            if keep_iterates:
                iterates.append((u, v))
            outcome = "max_iters"
            break
        u, v = refit_u, refit_v

        sup = max(float(np.max(u.values)), float(np.max(v.values)))
        sup_norms.append(sup)
        if keep_iterates:
            iterates.append((u, v))
        if sup < COLLAPSE_FACTOR * sup0:
            outcome = "collapse_to_zero"
            break
        if sup > BLOWUP_FACTOR * sup0:
            outcome = "blow_up"
            break
    else:
        outcome = "stationary" if residuals and residuals[-1] < STATIONARY_RESIDUAL else "max_iters"

    if sup_norms[0] == 0.0 and all(s == 0.0 for s in sup_norms):
        outcome = "collapse_to_zero"

    return PicardTrajectory(
        iterates=tuple(iterates),
        sup_norms=tuple(sup_norms),
        residuals=tuple(residuals),
        outcome=outcome,
        warnings=tuple(warn_log),
    )


# ---------------------------------------------------------------------------
# region sweeps


@dataclass(frozen=True)
class RegionMap:
    """Verdict grid over a (p, q) rectangle; deterministic and CSV-able."""

    p_values: np.ndarray
    q_values: np.ndarray
    verdicts: tuple          # row-major [i_p][i_q]
    reasons: tuple

    def verdict_at(self, i: int, j: int) -> str:
        return self.verdicts[i][j]

    def rows(self):
        for i, p in enumerate(self.p_values):
            for j, q in enumerate(self.q_values):
                yield p, q, self.verdicts[i][j], self.reasons[i][j]

    def to_csv(self, path) -> None:
        path = Path(path)
        with path.open("w", newline="") as fh:
            fh.write("# fraclap v0.1.0 schema=1\n")
            writer = csv.writer(fh)
            writer.writerow(["p", "q", "verdict", "reason"])
            for p, q, verd, reason in self.rows():
                writer.writerow([f"{p:.17g}", f"{q:.17g}", verd, reason])


def region_map(params_template: ProblemParams, p_range: tuple[float, float],
               q_range: tuple[float, float], resolution: int,
               threads: int | None = None) -> RegionMap:
    """Classify every cell of a (p, q) grid built around a template point."""
    if resolution < 1:
        raise OutOfRange("resolution", f"need >= 1, got {resolution}")
    if not (p_range[0] > 0 and q_range[0] > 0):
        raise OutOfRange("p_range", "ranges must be positive")
    if not (p_range[1] >= p_range[0] and q_range[1] >= q_range[0]):
        raise OutOfRange("p_range", "ranges must be ordered")
    ps = np.linspace(p_range[0], p_range[1], resolution)
    qs = np.linspace(q_range[0], q_range[1], resolution)

    def cell(p, q):
        prm = ProblemParams(n=params_template.n, k=params_template.k,
                            l=params_template.l, alpha=params_template.alpha,
                            beta=params_template.beta, a=params_template.a,
                            b=params_template.b, p=float(p), q=float(q))
        return classify(prm)

    if threads and threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            flat = list(pool.map(lambda pq: cell(*pq),
                                 [(p, q) for p in ps for q in qs]))
        results = [flat[i * len(qs):(i + 1) * len(qs)] for i in range(len(ps))]
    else:
        results = [[cell(p, q) for q in qs] for p in ps]

    verdicts = tuple(tuple(rv.verdict for rv in row) for row in results)
    reasons = tuple(tuple(rv.reason for rv in row) for row in results)
    return RegionMap(p_values=ps, q_values=qs, verdicts=verdicts, reasons=reasons)
