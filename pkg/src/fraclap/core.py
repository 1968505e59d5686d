"""Problem parameters, radial grid functions, and shared validation.

The two workhorse types are :class:`ProblemParams` (the nine scalars of the
coupled system, with their admissibility checks) and :class:`RadialFunction`
(a scalar field on a positive log-spaced grid with an explicit power-law
tail).  Everything downstream -- quadrature, kernels, classification -- is a
pure function over these immutable records.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (
    DuplicateRadius,
    GridTooSmall,
    NonFiniteValue,
    OutOfRange,
    TailRequired,
)

MIN_GRID_POINTS = 8

__all__ = [
    "ProblemParams",
    "QuadratureSpec",
    "Tail",
    "RadialFunction",
    "validate",
    "make_radial",
    "radial_from_callable",
    "default_grid",
    "save_radial",
    "load_radial",
    "MIN_GRID_POINTS",
]


@dataclass(frozen=True)
class ProblemParams:
    """Scalars (n, k, l, alpha, beta, a, b, p, q) of the coupled system.

    ``n`` is the ambient dimension, ``k``/``l`` the integer Laplacian powers,
    ``alpha``/``beta`` the fractional orders in (0, min(2, n)), ``a``/``b``
    the radial weight exponents, and ``p``/``q`` the nonlinearity exponents.
    """

    n: int
    k: int = 0
    l: int = 0
    alpha: float = 1.0
    beta: float = 1.0
    a: float = 0.0
    b: float = 0.0
    p: float = 1.0
    q: float = 1.0

    @property
    def order_u(self) -> float:
        return 2 * self.k + self.alpha

    @property
    def order_v(self) -> float:
        return 2 * self.l + self.beta

    @property
    def subcritical_order(self) -> bool:
        return self.order_u < self.n and self.order_v < self.n

    @property
    def high_order(self) -> bool:
        return max(self.order_u, self.order_v) >= self.n

    @property
    def critical_p(self) -> float:
        """Upper endpoint of the admissible p-range in the subcritical box."""
        return (self.n + 2 * self.k + self.alpha + 2 * self.a) / (self.n - 2 * self.l - self.beta)

    @property
    def critical_q(self) -> float:
        return (self.n + 2 * self.l + self.beta + 2 * self.b) / (self.n - 2 * self.k - self.alpha)

    def swapped(self) -> "ProblemParams":
        """The parameter point with the roles of the two equations exchanged."""
        return ProblemParams(n=self.n, k=self.l, l=self.k, alpha=self.beta,
                             beta=self.alpha, a=self.b, b=self.a, p=self.q, q=self.p)


def validate(params: ProblemParams) -> ProblemParams:
    """Check every admissibility constraint; return the record unchanged.

    Raises :class:`OutOfRange` naming the offending field otherwise.  The
    derived flags (``subcritical_order``, ``high_order``) are properties of
    the returned record.
    """
    p = params
    if not isinstance(p.n, (int, np.integer)) or p.n < 1:
        raise OutOfRange("n", f"dimension must be an integer >= 1, got {p.n!r}")
    for name in ("k", "l"):
        v = getattr(p, name)
        if not isinstance(v, (int, np.integer)) or v < 0:
            raise OutOfRange(name, f"must be a nonnegative integer, got {v!r}")
    cap = min(2.0, float(p.n))
    for name in ("alpha", "beta"):
        v = float(getattr(p, name))
        if not math.isfinite(v) or not 0.0 < v < cap:
            raise OutOfRange(name, f"must satisfy 0 < {name} < min(2, n) = {cap}, got {v!r}")
    for name in ("a", "b", "p", "q"):
        v = float(getattr(p, name))
        if not math.isfinite(v) or v < 0.0:
            raise OutOfRange(name, f"must be finite and >= 0, got {v!r}")
    return p


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and node counts for the quadrature engine.

    ``pv_cutoff_delta`` is the radius of the symmetrized near-singularity
    ball used by principal-value integrals; ``None`` picks a scale-aware
    default at evaluation time.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-14
    max_subdivisions: int = 1024
    gauss_nodes: int = 16
    pv_cutoff_delta: float | None = None

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise OutOfRange("rel_tol", f"must be > 0, got {self.rel_tol!r}")
        if self.gauss_nodes < 4:
            raise OutOfRange("gauss_nodes", f"must be >= 4, got {self.gauss_nodes!r}")
        if self.abs_tol < 0:
            raise OutOfRange("abs_tol", f"must be >= 0, got {self.abs_tol!r}")
        if self.max_subdivisions < 1:
            raise OutOfRange("max_subdivisions", f"must be >= 1, got {self.max_subdivisions!r}")


@dataclass(frozen=True)
class Tail:
    """Power-law extension f(r) ~ c * r**(-sigma) for r beyond the grid."""

    sigma: float
    c: float


@dataclass(frozen=True)
class RadialFunction:
    """A radial scalar field sampled on a strictly increasing positive grid.

    Evaluation inside the grid uses monotone piecewise-cubic interpolation in
    (log r, value); beyond ``r_max`` the explicit :class:`Tail` record; below
    ``r_min`` the ``inner`` policy ("constant" extends the first value,
    "power" extends the log-log slope of the first two samples).
    """

    grid: np.ndarray
    values: np.ndarray
    tail: Tail | None = None
    inner: str = "constant"

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or values.shape != grid.shape:
            raise GridTooSmall("grid and values must be 1-D arrays of equal length")
        if grid.size < MIN_GRID_POINTS:
            raise GridTooSmall(f"need at least {MIN_GRID_POINTS} samples, got {grid.size}")
        if not np.all(np.isfinite(grid)) or np.any(grid <= 0):
            raise OutOfRange("grid", "radii must be finite and positive")
        if np.any(np.diff(grid) == 0):
            raise DuplicateRadius("grid contains a repeated radius")
        if not np.all(np.diff(grid) > 0):
            raise OutOfRange("grid", "radii must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise NonFiniteValue("values must all be finite")
        if self.inner not in ("constant", "power"):
            raise OutOfRange("inner", f"unknown inner policy {self.inner!r}")
        if self.inner == "power" and (values[0] <= 0 or values[1] <= 0):
            raise OutOfRange("inner", "power extension needs positive leading values")
        grid = grid.copy()
        values = values.copy()
        grid.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        log_grid = np.log(grid)
        log_grid.flags.writeable = False
        object.__setattr__(self, "_log_grid", log_grid)
        object.__setattr__(self, "_interp", PchipInterpolator(log_grid, values, extrapolate=False))

    @property
    def r_min(self) -> float:
        return float(self.grid[0])

    @property
    def r_max(self) -> float:
        return float(self.grid[-1])

    def _inner_sigma(self) -> float:
        # log-log slope of the first two samples, as a decay exponent
        return -(math.log(self.values[1] / self.values[0])
                 / math.log(self.grid[1] / self.grid[0]))

    def __call__(self, r):
        """Evaluate at radius (scalar or array); deterministic and pure."""
        r_arr = np.asarray(r, dtype=float)
        scalar = r_arr.ndim == 0
        r_arr = np.atleast_1d(r_arr)
        if np.any(r_arr < 0) or not np.all(np.isfinite(r_arr)):
            raise OutOfRange("r", "radii must be finite and >= 0")
        out = np.empty_like(r_arr)

        low = r_arr < self.r_min
        high = r_arr > self.r_max
        mid = ~(low | high)
        if np.any(mid):
            out[mid] = self._interp(np.log(r_arr[mid]))
        if np.any(low):
            if self.inner == "constant":
                out[low] = self.values[0]
            else:
                sig = self._inner_sigma()
                out[low] = self.values[0] * (r_arr[low] / self.r_min) ** (-sig)
        if np.any(high):
            if self.tail is None:
                raise TailRequired(
                    f"evaluation at r={r_arr[high].max():g} > r_max={self.r_max:g} needs a tail record")
            if self.tail.c == 0.0:
                out[high] = 0.0
            else:
                out[high] = self.tail.c * r_arr[high] ** (-self.tail.sigma)
        return float(out[0]) if scalar else out

    def with_tail(self, tail: Tail | None) -> "RadialFunction":
        return replace(self, tail=tail)


def make_radial(samples, tail: Tail | None = None, inner: str = "constant") -> RadialFunction:
    """Build a :class:`RadialFunction` from (radius, value) pairs.

    Samples are sorted by radius; duplicates raise :class:`DuplicateRadius`.
    """
    pairs = list(samples)
    if len(pairs) == 0:
        raise GridTooSmall("empty sample list")
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise OutOfRange("samples", "expected a sequence of (radius, value) pairs")
    order = np.argsort(arr[:, 0], kind="stable")
    radii = arr[order, 0]
    vals = arr[order, 1]
    if np.any(np.diff(radii) == 0):
        raise DuplicateRadius("two samples share a radius")
    return RadialFunction(radii, vals, tail=tail, inner=inner)


def radial_from_callable(fn, grid, tail: Tail | None = None, inner: str = "constant") -> RadialFunction:
    """Sample ``fn`` on ``grid`` (vectorized call) and wrap the result."""
    grid = np.asarray(grid, dtype=float)
    vals = np.asarray(fn(grid), dtype=float)
    return RadialFunction(grid, vals, tail=tail, inner=inner)


def default_grid(r_min: float = 1e-3, r_max: float = 1e4, points: int = 256) -> np.ndarray:
    """Log-spaced grid covering the unit-scale constructions with margin."""
    if not (0 < r_min < r_max):
        raise OutOfRange("r_min", "need 0 < r_min < r_max")
    if points < MIN_GRID_POINTS:
        raise OutOfRange("points", f"need at least {MIN_GRID_POINTS} points")
    return np.geomspace(r_min, r_max, points)


def _sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def save_radial(rf: RadialFunction, csv_path) -> None:
    """Write ``r,value`` CSV plus a JSON sidecar with tail and inner policy."""
    csv_path = Path(csv_path)
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "value"])
        for r, v in zip(rf.grid, rf.values):
            writer.writerow([f"{r:.17g}", f"{v:.17g}"])
    meta = {
        "tail": None if rf.tail is None else {"sigma": rf.tail.sigma, "c": rf.tail.c},
        "inner": rf.inner,
    }
    _sidecar_path(csv_path).write_text(json.dumps(meta, indent=2) + "\n")


def load_radial(csv_path) -> RadialFunction:
    """Inverse of :func:`save_radial`; sidecar is optional."""
    csv_path = Path(csv_path)
    with csv_path.open(newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and not row[0].startswith("#")]
    if rows and rows[0][:2] == ["r", "value"]:
        rows = rows[1:]
    data = np.asarray([[float(r), float(v)] for r, v in rows])
    tail = None
    inner = "constant"
    sidecar = _sidecar_path(csv_path)
    if sidecar.exists():
        meta = json.loads(sidecar.read_text())
        if meta.get("tail") is not None:
            tail = Tail(float(meta["tail"]["sigma"]), float(meta["tail"]["c"]))
        inner = meta.get("inner", "constant")
    return RadialFunction(data[:, 0], data[:, 1], tail=tail, inner=inner)
