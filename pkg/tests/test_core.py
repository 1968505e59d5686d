import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fraclap as fl
from fraclap.errors import (
    DuplicateRadius,
    GridTooSmall,
    NonFiniteValue,
    OutOfRange,
    TailRequired,
)


class TestValidate:
    def test_plain_fractional_point(self):
        p = fl.validate(fl.ProblemParams(n=3, alpha=1, beta=1, p=2, q=2))
        assert p.subcritical_order and not p.high_order

    def test_high_order_flag_from_arithmetic(self):
        # 2k + alpha = 2.5 >= n = 2
        p = fl.validate(fl.ProblemParams(n=2, k=1, alpha=0.5, beta=0.5))
        assert p.high_order and not p.subcritical_order

    def test_alpha_exceeds_min_2_n(self):
        with pytest.raises(OutOfRange) as exc:
            fl.validate(fl.ProblemParams(n=1, alpha=1.5, beta=0.5))
        assert exc.value.field == "alpha"

    @pytest.mark.parametrize("field,kwargs", [
        ("n", dict(n=0)),
        ("k", dict(n=3, k=-1)),
        ("beta", dict(n=3, beta=2.0)),
        ("p", dict(n=3, p=-0.5)),
        ("a", dict(n=3, a=-1.0)),
    ])
    def test_offending_field_is_named(self, field, kwargs):
        with pytest.raises(OutOfRange) as exc:
            fl.validate(fl.ProblemParams(**kwargs))
        assert exc.value.field == field

    @given(n=st.integers(2, 8), alpha=st.floats(0.01, 1.99),
           beta=st.floats(0.01, 1.99), p=st.floats(0, 10), q=st.floats(0, 10))
    @settings(max_examples=60, deadline=None)
    def test_accepts_exactly_the_admissible_set(self, n, alpha, beta, p, q):
        params = fl.ProblemParams(n=n, alpha=alpha, beta=beta, p=p, q=q)
        fl.validate(params)  # all sampled values satisfy the hypotheses


class TestRadialFunction:
    def test_power_law_with_matching_tail(self):
        grid = np.geomspace(0.01, 100, 64)
        u = fl.make_radial(list(zip(grid, grid ** -2.0)), tail=fl.Tail(2.0, 1.0))
        # interpolation error of the 64-point log grid, not quadrature error
        assert u(5.0) == pytest.approx(0.04, rel=1e-4)
        assert u(500.0) == pytest.approx(500.0 ** -2, rel=1e-12)  # tail zone

    def test_samples_reproduced_exactly(self):
        grid = np.geomspace(0.1, 10, 16)
        vals = 1.0 / (1.0 + grid ** 2)
        u = fl.make_radial(list(zip(grid, vals)), tail=fl.Tail(2.0, 1.0))
        assert u(1.0) == pytest.approx(1.0 / (1.0 + 1.0), abs=0.0) or \
            abs(u(1.0) - 0.5) < 1e-15
        for r, v in zip(grid, vals):
            assert u(float(r)) == v

    def test_empty_samples_rejected(self):
        with pytest.raises(GridTooSmall):
            fl.make_radial([])

    def test_duplicate_radius_rejected(self):
        pts = [(0.1 * k, 1.0) for k in range(1, 10)] + [(0.5, 2.0)]
        with pytest.raises(DuplicateRadius):
            fl.make_radial(pts)

    def test_nonfinite_value_rejected(self):
        grid = np.geomspace(0.1, 10, 16)
        vals = np.ones_like(grid)
        vals[3] = np.nan
        with pytest.raises(NonFiniteValue):
            fl.RadialFunction(grid, vals)

    def test_monotone_data_gives_monotone_interpolant(self):
        rng = np.random.default_rng(7)
        grid = np.geomspace(0.1, 10, 32)
        vals = np.sort(rng.uniform(0.1, 5.0, grid.size))[::-1]  # decreasing
        u = fl.RadialFunction(grid, vals, tail=fl.Tail(1.0, vals[-1] * grid[-1]))
        dense = np.geomspace(grid[0], grid[-1], 4000)
        out = u(dense)
        assert np.all(np.diff(out) <= 1e-14)

    def test_evaluation_is_deterministic(self):
        grid = np.geomspace(0.01, 100, 100)
        vals = np.exp(-grid)
        u1 = fl.RadialFunction(grid, vals, tail=fl.Tail(5.0, 0.1))
        u2 = fl.RadialFunction(grid.copy(), vals.copy(), tail=fl.Tail(5.0, 0.1))
        pts = np.geomspace(0.02, 50, 333)
        assert np.array_equal(u1(pts), u2(pts))

    def test_tail_required_beyond_grid(self):
        u = fl.radial_from_callable(lambda r: 1.0 / r, np.geomspace(0.1, 10, 16))
        with pytest.raises(TailRequired):
            u(20.0)

    def test_inner_policies(self):
        grid = np.geomspace(1.0, 100, 32)
        const = fl.radial_from_callable(lambda r: r ** -1.5, grid, inner="constant")
        power = fl.radial_from_callable(lambda r: r ** -1.5, grid, inner="power")
        assert const(0.5) == const(1.0)
        assert power(0.5) == pytest.approx(0.5 ** -1.5, rel=1e-6)

    def test_serialization_roundtrip(self, tmp_path):
        grid = np.geomspace(0.01, 100, 40)
        u = fl.radial_from_callable(lambda r: np.exp(-r) + 1e-3, grid,
                                    tail=fl.Tail(3.0, 1e-3), inner="power")
        path = tmp_path / "u.csv"
        fl.save_radial(u, path)
        v = fl.load_radial(path)
        assert np.array_equal(u.grid, v.grid)
        assert np.array_equal(u.values, v.values)
        assert v.tail == fl.Tail(3.0, 1e-3)
        assert v.inner == "power"


class TestQuadratureSpec:
    def test_defaults_valid(self):
        spec = fl.QuadratureSpec()
        assert spec.rel_tol == 1e-8 and spec.gauss_nodes >= 4

    @pytest.mark.parametrize("kwargs,field", [
        (dict(rel_tol=0.0), "rel_tol"),
        (dict(gauss_nodes=3), "gauss_nodes"),
        (dict(max_subdivisions=0), "max_subdivisions"),
    ])
    def test_invariants(self, kwargs, field):
        with pytest.raises(OutOfRange) as exc:
            fl.QuadratureSpec(**kwargs)
        assert exc.value.field == field


def test_default_grid_window():
    g = fl.default_grid()
    assert g.size == 256 and g[0] == pytest.approx(1e-3) and g[-1] == pytest.approx(1e4)
    with pytest.raises(OutOfRange):
        fl.default_grid(1.0, 0.1)
