"""Quadrature engine: smooth, endpoint-singular, and principal-value integrals.

One adaptive driver covers everything the library integrates.  Interior
panels use Gauss-Legendre; panels touching a declared algebraic endpoint
singularity (t-a)^(-mu) use Gauss-Jacobi with the singular factor folded
into the weight, so the rule is exact for polynomial x weight.  Negative
``mu`` is allowed (a vanishing algebraic weight, still best handled by
Jacobi).  The principal-value evaluator reduces the hypersingular integral
of a radial function to a 1-D radial integral of spherical-mean differences,
which is the symmetrized (second-difference) form: the mean over a sphere
of directions contains every +/-z pair, so u(x+z)+u(x-z)-2u(x) appears
automatically and the integrand is O(rho^(1-alpha)) near the origin.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gamma as _gamma
from scipy.special import roots_jacobi, roots_legendre

from .core import QuadratureSpec, RadialFunction
from .errors import NoConvergence, NotInLalpha, OutOfRange, ResolutionTooCoarse

DEFAULT_SPEC = QuadratureSpec()

__all__ = [
    "Integrand1D",
    "integrate",
    "integrate_pv_symmetric",
    "pv_truncated",
    "sphere_mean_diff",
    "DEFAULT_SPEC",
]


@lru_cache(maxsize=256)
def _legendre(n: int):
    return roots_legendre(n)


@lru_cache(maxsize=1024)
def _jacobi(n: int, a: float, b: float):
    return roots_jacobi(n, a, b)


@dataclass(frozen=True)
class Integrand1D:
    """Evaluation map on (a, b) with declared endpoint singularity exponents.

    The integrand is assumed to behave like (t-a)^(-mu_a) near a and
    (b-t)^(-mu_b) near b; integrability requires mu < 1.
    """

    fn: object
    a: float
    b: float
    mu_a: float = 0.0
    mu_b: float = 0.0


def _ensure_vectorized(f, a, b):
    probe = np.array([a + (b - a) * 0.37, a + (b - a) * 0.61])
    try:
        out = np.asarray(f(probe), dtype=float)
        if out.shape == probe.shape:
            return f
    except Exception:
        pass
    return np.vectorize(f, otypes=[float])


def _panel_gl(f, lo, hi, n):
    x, w = _legendre(n)
    half = 0.5 * (hi - lo)
    t = lo + half * (x + 1.0)
    return half * float(np.dot(w, f(t)))


def _panel_jacobi_lo(f, edge, lo, hi, mu, n):
    # integral over [lo, hi] where lo == edge carries the (t-edge)^(-mu) factor
    x, w = _jacobi(n, 0.0, -mu)
    half = 0.5 * (hi - lo)
    t = lo + half * (x + 1.0)
    g = f(t) * (t - edge) ** mu
    return half ** (1.0 - mu) * float(np.dot(w, g))


def _panel_jacobi_hi(f, edge, lo, hi, mu, n):
    x, w = _jacobi(n, -mu, 0.0)
    half = 0.5 * (hi - lo)
    t = lo + half * (x + 1.0)
    g = f(t) * (edge - t) ** mu
    return half ** (1.0 - mu) * float(np.dot(w, g))


def _eval_panel(f, lo, hi, kind, mu, n):
    """Return (value, error_estimate) comparing an n and 2n+1 node rule."""
    if kind == "gl":
        coarse = _panel_gl(f, lo, hi, n)
        fine = _panel_gl(f, lo, hi, 2 * n + 1)
    elif kind == "ja":
        coarse = _panel_jacobi_lo(f, lo, lo, hi, mu, n)
        fine = _panel_jacobi_lo(f, lo, lo, hi, mu, 2 * n + 1)
    else:
        coarse = _panel_jacobi_hi(f, hi, lo, hi, mu, n)
        fine = _panel_jacobi_hi(f, hi, lo, hi, mu, 2 * n + 1)
    return fine, abs(fine - coarse)


def integrate(f, a=None, b=None, *, mu_a: float = 0.0, mu_b: float = 0.0,
              spec: QuadratureSpec | None = None, breakpoints=(), full_output: bool = False):
    """Adaptive integral of ``f`` over (a, b) with declared endpoint exponents.

    ``f`` may be an :class:`Integrand1D` (then a, b, mu are taken from it) or
    a callable accepting numpy arrays.  ``breakpoints`` seeds panel edges at
    known kinks.  Raises :class:`NoConvergence` -- carrying the best estimate
    and an error bound -- when the subdivision budget runs out.
    """
    if isinstance(f, Integrand1D):
        a, b, mu_a, mu_b = f.a, f.b, f.mu_a, f.mu_b
        f = f.fn
    if a is None or b is None:
        raise OutOfRange("interval", "integration limits are required")
    if not (math.isfinite(a) and math.isfinite(b)):
        raise OutOfRange("interval", "limits must be finite")
    if mu_a >= 1.0 or mu_b >= 1.0:
        raise OutOfRange("mu", f"endpoint exponents must be < 1, got ({mu_a}, {mu_b})")
    spec = spec or DEFAULT_SPEC
    if a == b:
        return (0.0, 0.0) if full_output else 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
        mu_a, mu_b = mu_b, mu_a

    f = _ensure_vectorized(f, a, b)
    n = spec.gauss_nodes

    edges = sorted({a, b} | {float(t) for t in breakpoints if a < float(t) < b})
    if len(edges) == 2 and mu_a != 0.0 and mu_b != 0.0:
        edges = [a, 0.5 * (a + b), b]

    def kind_of(lo, hi):
        if lo == a and mu_a != 0.0:
            return "ja", mu_a
        if hi == b and mu_b != 0.0:
            return "jb", mu_b
        return "gl", 0.0

    heap = []
    seq = 0
    total = 0.0
    total_err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        kind, mu = kind_of(lo, hi)
        val, err = _eval_panel(f, lo, hi, kind, mu, n)
        total += val
        total_err += err
        heapq.heappush(heap, (-err, seq, lo, hi, val, err))
        seq += 1

    splits = 0
    best_err = math.inf
    stall = 0
    while total_err > max(spec.abs_tol, spec.rel_tol * abs(total)):
        if splits >= spec.max_subdivisions or not heap:
            raise NoConvergence(sign * total, total_err)
        if total_err < 0.98 * best_err:
            best_err = total_err
            stall = 0
        else:
            stall += 1
            if stall >= 60:
                # error bound stopped improving: the estimate is noise-limited
                # (roundoff floor), not under-resolved; accept it
                break
        _, _, lo, hi, val, err = heapq.heappop(heap)
        if err <= 0.0 or (hi - lo) <= abs(hi + lo) * 1e-15 + 1e-300:
            # panel cannot be improved; retire it
            continue
        mid = 0.5 * (lo + hi)
        total -= val
        total_err -= err
        for clo, chi in ((lo, mid), (mid, hi)):
            kind, mu = kind_of(clo, chi)
            cval, cerr = _eval_panel(f, clo, chi, kind, mu, n)
            total += cval
            total_err += cerr
            heapq.heappush(heap, (-cerr, seq, clo, chi, cval, cerr))
            seq += 1
        splits += 1

    if full_output:
        return sign * total, total_err
    return sign * total


def _angular_weight_mass(n: int) -> float:
    # integral of (1-c^2)^((n-3)/2) over (-1, 1)
    return math.sqrt(math.pi) * _gamma((n - 1) / 2.0) / _gamma(n / 2.0)


def _weighted_mass_n3(u: RadialFunction, lo: float, hi: float) -> float:
    """integral of t * u(t) dt over (lo, hi), exact for the interpolant.

    In three dimensions the spherical mean of u over the sphere of radius
    rho centered at |x| = r0 equals this integral over (|rho-r0|, rho+r0)
    divided by 2 r0 rho.  The grid cells act as fixed panels: on each cell
    the integrand is exp(2x) * (cubic in x = log t), which a 10-node
    Gauss-Legendre rule integrates to machine accuracy, so no adaptivity or
    error estimation is needed.  Inner-policy and tail zones are integrated
    in closed form.
    """
    if hi <= lo:
        return 0.0
    total = 0.0

    a = lo
    b = min(hi, u.r_min)
    if b > a:  # inner zone
        v0 = float(u.values[0])
        if u.inner == "constant":
            total += 0.5 * v0 * (b * b - a * a)
        else:
            s = u._inner_sigma()
            scale = v0 * u.r_min ** s
            if abs(s - 2.0) < 1e-13:
                total += scale * math.log(b / max(a, 1e-300))
            else:
                total += scale * (b ** (2.0 - s) - a ** (2.0 - s)) / (2.0 - s)

    a = max(lo, u.r_min)
    b = min(hi, u.r_max)
    if b > a:  # grid zone, composite Gauss in x = log t per cell
        xa, xb = math.log(a), math.log(b)
        xg = u._log_grid
        i0 = np.searchsorted(xg, xa, side="right")
        i1 = np.searchsorted(xg, xb, side="left")
        xi, wi = _legendre(10)
        if i0 >= i1:
            # window inside one cell: log(b) - log(a) would lose precision
            # for b - a << a, and that relative error lands on the mean
            width = math.log1p((b - a) / a)
            halves = np.array([0.5 * width])
            mids = np.array([xa + 0.5 * width])
        else:
            edges = np.concatenate(([xa], xg[i0:i1], [xb]))
            halves = 0.5 * np.diff(edges)
            mids = 0.5 * (edges[:-1] + edges[1:])
        nodes = mids[:, None] + halves[:, None] * xi[None, :]
        vals = u._interp(nodes.ravel()).reshape(nodes.shape)
        total += float(np.dot(halves, (np.exp(2.0 * nodes) * vals) @ wi))

    a = max(lo, u.r_max)
    b = hi
    if b > a:  # tail zone
        if u.tail is None:
            raise NotInLalpha("tail record required beyond the grid")
        sig, c = u.tail.sigma, u.tail.c
        if c != 0.0:
            if abs(sig - 2.0) < 1e-13:
                total += c * math.log(b / a)
            else:
                total += c * (b ** (2.0 - sig) - a ** (2.0 - sig)) / (2.0 - sig)
    return total


def sphere_mean_diff(u, x_radius: float, rho: float, n: int,
                     spec: QuadratureSpec | None = None) -> float:
    """Mean over directions of u(x) - u(x + rho*omega) for radial u, |x| = x_radius.

    Integrating the difference (rather than the mean itself) keeps the
    cancellation inside each node, which matters for small rho where the
    result is O(rho^2).
    """
    spec = spec or DEFAULT_SPEC
    ux = u(x_radius)
    if x_radius == 0.0:
        return ux - u(rho)
    if rho == 0.0:
        return 0.0
    if n == 1:
        return ux - 0.5 * (u(x_radius + rho) + u(abs(x_radius - rho)))
    if n == 3 and isinstance(u, RadialFunction):
        mass = _weighted_mass_n3(u, abs(rho - x_radius), rho + x_radius)
        return ux - mass / (2.0 * x_radius * rho)

    def f(c):
        arg = np.sqrt(x_radius * x_radius + rho * rho + 2.0 * x_radius * rho * c)
        return ux - u(arg)

    mu = (3 - n) / 2.0  # folds the (1-c^2)^((n-3)/2) weight into Jacobi panels
    inner = QuadratureSpec(rel_tol=max(spec.rel_tol * 0.25, 1e-13),
                           abs_tol=spec.abs_tol,
                           max_subdivisions=spec.max_subdivisions,
                           gauss_nodes=spec.gauss_nodes)
    if n == 3:
        val = integrate(f, -1.0, 1.0, spec=inner)
    else:
        def weighted(c):
            return f(c) * (1.0 - c * c) ** ((n - 3) / 2.0)
        val = integrate(weighted, -1.0, 1.0, mu_a=mu, mu_b=mu, spec=inner)
    return val / _angular_weight_mass(n)


def _check_membership(u: RadialFunction):
    """Tail admissibility for the nonlocal membership integral.

    Decaying or bounded tails (sigma >= 0) are accepted; growing tails are
    rejected.  A missing tail record cannot certify membership.
    """
    if u.tail is None:
        raise NotInLalpha("a tail record is required to certify membership")
    if u.tail.c != 0.0 and u.tail.sigma < 0.0:
        raise NotInLalpha(f"growing tail (sigma={u.tail.sigma}) violates membership")


def _check_resolution(u: RadialFunction, x_radius: float):
    if x_radius == 0.0:
        return
    if not (u.r_min <= x_radius <= u.r_max):
        raise ResolutionTooCoarse(
            f"evaluation radius {x_radius:g} outside grid [{u.r_min:g}, {u.r_max:g}]")
    nearby = np.count_nonzero((u.grid >= 0.5 * x_radius) & (u.grid <= 2.0 * x_radius))
    if nearby < 4:
        raise ResolutionTooCoarse(
            f"only {nearby} grid points within a factor 2 of r={x_radius:g}")


def _kink_radii(u: RadialFunction, x_radius: float, lo: float, hi: float,
                cap: int = 120) -> list:
    """Radii in (lo, hi) where the sphere of radius rho around x crosses a node.

    The spherical mean is only C^2 in rho across these points; seeding them
    as panel edges keeps the adaptive driver out of blind bisection.
    Decimated to at most ``cap`` entries.
    """
    g = u.grid
    up = g[(g > x_radius + lo) & (g < x_radius + hi)] - x_radius
    dn = x_radius - g[(g > x_radius - hi) & (g < x_radius - lo)]
    ks = np.sort(np.concatenate([up, dn]))
    if ks.size > cap:
        ks = ks[:: int(math.ceil(ks.size / cap))]
    return [float(t) for t in ks]


def _pv_pieces(u: RadialFunction, x_radius: float, alpha: float, n: int,
               spec: QuadratureSpec, delta: float):
    """Near-field (symmetrized, [0, delta]) and far-field ([delta, inf)) pieces.

    Both are radial integrals of rho^(-1-alpha) * D(rho) with
    D(rho) = mean over directions of (u(x) - u(x + rho omega)); beyond a
    numeric horizon the mean is replaced by the tail power law and the
    remainder integrated in closed form.
    """
    ux = u(x_radius)

    def D(rho_arr):
        rho_arr = np.atleast_1d(np.asarray(rho_arr, dtype=float))
        return np.array([sphere_mean_diff(u, x_radius, r, n, spec) for r in rho_arr])

    horizon = max(4.0 * u.r_max, 100.0 * max(x_radius, delta))
    brk = _kink_radii(u, x_radius, delta, horizon, cap=160)
    t = delta * 4.0
    while t < horizon:
        brk.append(t)
        t *= 4.0
    far = integrate(lambda rho: D(rho) * rho ** (-1.0 - alpha),
                    delta, horizon, breakpoints=brk, spec=spec)

    sigma, c = u.tail.sigma, u.tail.c
    remainder = ux * horizon ** (-alpha) / alpha
    if c != 0.0:
        remainder -= c * horizon ** (-alpha - sigma) / (alpha + sigma)

    # The near integrand is O(rho^(1-alpha)) but its absolute noise floor is
    # O(eps * |u| * rho^(-1-alpha)); below rho_floor the signal drowns, so
    # that piece is modeled by the quadratic mean-defect coefficient instead
    # of integrated.  The model error is O((rho_floor/delta)^(3-alpha))
    # relative to the near-field term.  At x = 0 the data carries no
    # curvature below r_min (the inner policy is an extension, not data), so
    # the resolution floor moves up to 2 r_min there.
    rho_floor = 1e-4 * delta
    if x_radius == 0.0:
        rho_floor = max(rho_floor, 2.0 * u.r_min)
        if rho_floor >= 0.5 * delta:
            raise ResolutionTooCoarse(
                f"grid starts at {u.r_min:g}, too coarse for the near field at the origin")
    h0 = float(D(np.array([rho_floor]))[0]) / rho_floor ** 2
    near = h0 * rho_floor ** (2.0 - alpha) / (2.0 - alpha)
    # absolute target from the whole integral, so a small near field is not
    # chased to a meaningless relative precision of its own
    scale = abs(far) + abs(remainder) + abs(near)
    near_spec = QuadratureSpec(rel_tol=spec.rel_tol,
                               abs_tol=max(spec.abs_tol, 0.5 * spec.rel_tol * scale),
                               max_subdivisions=spec.max_subdivisions,
                               gauss_nodes=spec.gauss_nodes)
    brk = _kink_radii(u, x_radius, rho_floor, delta) + \
        [delta * 10.0 ** (-k) for k in range(1, 5)]
    near += integrate(lambda rho: D(rho) * rho ** (-1.0 - alpha),
                      rho_floor, delta, spec=near_spec, breakpoints=brk)
    return near, far, remainder


def integrate_pv_symmetric(u: RadialFunction, x_radius: float, alpha: float, n: int,
                           spec: QuadratureSpec | None = None) -> float:
    """P.V. integral of (u(x) - u(y)) / |x-y|^(n+alpha) over R^n, radial u.

    The normalization constant is NOT applied; multiply by the
    fractional-Laplacian constant for the operator value.  Near the
    singularity the integrand is the symmetrized second difference, which
    removes the hypersingularity to order rho^(2-alpha).
    """
    spec = spec or DEFAULT_SPEC
    if not 0.0 < alpha < 2.0:
        raise OutOfRange("alpha", f"need 0 < alpha < 2, got {alpha}")
    if n < 1:
        raise OutOfRange("n", f"need n >= 1, got {n}")
    if x_radius < 0:
        raise OutOfRange("x_radius", "must be >= 0")
    _check_membership(u)
    _check_resolution(u, x_radius)

    delta = spec.pv_cutoff_delta if spec.pv_cutoff_delta is not None else \
        (0.5 * x_radius if x_radius > 0 else 0.5)
    near, far, remainder = _pv_pieces(u, x_radius, alpha, n, spec, delta)
    omega = 2.0 * math.pi ** (n / 2.0) / _gamma(n / 2.0)
    return omega * (near + far + remainder)


def pv_truncated(u: RadialFunction, x_radius: float, alpha: float, n: int,
                 delta: float, spec: QuadratureSpec | None = None) -> float:
    """Naive truncation: the difference integral over |z| > delta only.

    Compared with :func:`integrate_pv_symmetric`, the omitted near-field is
    O(delta^(2-alpha)) for C^2 data; used by the convergence-order tests.
    """
    spec = spec or DEFAULT_SPEC
    _check_membership(u)
    _, far, remainder = _pv_pieces(u, x_radius, alpha, n, spec, delta)
    omega = 2.0 * math.pi ** (n / 2.0) / _gamma(n / 2.0)
    return omega * (far + remainder)
