import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate

import fraclap as fl
from fraclap.errors import NoConvergence, NotInLalpha, OutOfRange, ResolutionTooCoarse
from fraclap.quad import Integrand1D, integrate, pv_truncated, sphere_mean_diff


class TestIntegrate:
    @pytest.mark.parametrize("mu", [-0.9, -0.5, 0.0, 1.0, 2.0])
    def test_power_laws(self, mu):
        val = integrate(lambda t: t ** mu, 0.0, 1.0, mu_a=max(0.0, -mu))
        assert val == pytest.approx(1.0 / (mu + 1.0), rel=1e-10)

    def test_inverse_sqrt(self):
        val = integrate(lambda t: t ** -0.5, 0.0, 1.0, mu_a=0.5)
        assert val == pytest.approx(2.0, abs=1e-10)

    def test_nonlocal_weight_beta_identity(self):
        # the weight of the constant-function average at order 1
        val = integrate(lambda t: (1 - t * t) ** -0.5, 0.0, 1.0, mu_b=0.5)
        assert val == pytest.approx(math.pi / 2, rel=1e-10)

    def test_green_inner_against_midpoint_oracle(self):
        # int_0^3 b^(-1/2) (1+b)^(-3/2) db; closed form sqrt(3)
        def f(b):
            return b ** -0.5 * (1 + b) ** -1.5

        val = integrate(f, 0.0, 3.0, mu_a=0.5)
        nodes = (np.arange(10_000_000) + 0.5) * (3.0 / 10_000_000)
        oracle = float(np.sum(f(nodes))) * (3.0 / 10_000_000)
        assert val == pytest.approx(oracle, rel=1e-6)
        assert val == pytest.approx(math.sqrt(3.0), rel=1e-10)

    def test_linearity_and_interval_additivity(self):
        f = lambda t: np.sin(t) + t ** 2
        g = lambda t: np.exp(-t)
        a, b, m = 0.0, 2.0, 0.7
        whole = integrate(lambda t: 2 * f(t) - 3 * g(t), a, b)
        parts = (2 * integrate(f, a, m) - 3 * integrate(g, a, m)
                 + 2 * integrate(f, m, b) - 3 * integrate(g, m, b))
        assert whole == pytest.approx(parts, rel=1e-10)

    def test_integrand1d_wrapper(self):
        spec = fl.QuadratureSpec(rel_tol=1e-10)
        item = Integrand1D(lambda t: t ** -0.25, 0.0, 1.0, mu_a=0.25)
        assert integrate(item, spec=spec) == pytest.approx(1 / 0.75, rel=1e-10)

    def test_reversed_limits_flip_sign(self):
        assert integrate(lambda t: t, 1.0, 0.0) == pytest.approx(-0.5, rel=1e-12)

    def test_no_convergence_carries_best_estimate(self):
        spec = fl.QuadratureSpec(max_subdivisions=4)
        with pytest.raises(NoConvergence) as exc:
            integrate(lambda t: np.abs(t) ** -0.97, 1e-300, 1.0, spec=spec)
        err = exc.value
        assert math.isfinite(err.best_estimate)
        assert err.error_bound > 0

    def test_mu_at_least_one_rejected(self):
        with pytest.raises(OutOfRange):
            integrate(lambda t: t, 0.0, 1.0, mu_a=1.0)

    def test_scalar_only_callable_is_wrapped(self):
        def scalar_f(t):
            if isinstance(t, np.ndarray):
                raise TypeError("scalars only")
            return t * t
        assert integrate(scalar_f, 0.0, 1.0) == pytest.approx(1 / 3, rel=1e-10)


class TestSphereMean:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_quadratic_function_mean_is_exact(self, n):
        # mean over the sphere of |x + rho w|^2 equals r0^2 + rho^2 in any n
        grid = np.geomspace(1e-3, 1e3, 512)
        u = fl.radial_from_callable(lambda r: r * r, grid, tail=fl.Tail(-2.0, 1.0))
        r0, rho = 0.8, 0.37
        want = u(r0) - (r0 * r0 + rho * rho)
        got = sphere_mean_diff(u, r0, rho, n)
        assert got == pytest.approx(want, rel=2e-6)

    def test_fast_and_generic_paths_agree(self, bump_potential_a1):
        u = bump_potential_a1
        for r0, rho in ((1.5, 0.3), (0.7, 2.0), (0.2, 0.19), (1.0, 1.0)):
            fast = sphere_mean_diff(u, r0, rho, 3)
            mean = integrate(
                lambda c: u(np.sqrt(r0 ** 2 + rho ** 2 + 2 * r0 * rho * c)), -1.0, 1.0) / 2.0
            assert fast == pytest.approx(u(r0) - mean, abs=1e-9 + 1e-6 * abs(fast))


class TestPVSymmetric:
    def test_constant_function_gives_zero(self):
        grid = np.geomspace(1e-3, 1e3, 256)
        one = fl.radial_from_callable(lambda r: np.full_like(r, 3.7), grid,
                                      tail=fl.Tail(0.0, 3.7))
        val = fl.integrate_pv_symmetric(one, 1.0, 1.0, 3)
        assert abs(val) < 1e-10

    def test_growing_tail_not_in_membership_class(self):
        grid = np.geomspace(1e-3, 1e3, 256)
        u = fl.radial_from_callable(lambda r: r ** 0.5, grid, tail=fl.Tail(-0.5, 1.0))
        with pytest.raises(NotInLalpha):
            fl.integrate_pv_symmetric(u, 1.0, 1.0, 2)

    def test_missing_tail_rejected(self):
        u = fl.radial_from_callable(lambda r: 1.0 / (1 + r * r), np.geomspace(0.1, 10, 64))
        with pytest.raises(NotInLalpha):
            fl.integrate_pv_symmetric(u, 1.0, 1.0, 3)

    def test_coarse_grid_rejected(self):
        u = fl.radial_from_callable(lambda r: 1.0 / (1 + r * r),
                                    np.geomspace(1e-3, 1e3, 9), tail=fl.Tail(2.0, 1.0))
        with pytest.raises(ResolutionTooCoarse):
            fl.integrate_pv_symmetric(u, 1.0, 1.0, 3)

    def test_bubble_at_origin_against_independent_oracle(self, deep_bubble):
        # oracle: QUADPACK on the analytic profile, entirely outside our engine
        n, alpha = 3, 1.0
        prof = lambda rho: (1 + rho * rho) ** -1.0
        oracle, _ = sp_integrate.quad(
            lambda rho: rho ** (-1 - alpha) * (1.0 - prof(rho)), 0, np.inf, limit=400)
        ours = fl.integrate_pv_symmetric(deep_bubble, 0.0, alpha, n)
        omega = fl.sphere_area(n)
        assert ours == pytest.approx(omega * oracle, rel=1e-4)
        assert fl.frac_constant(n, alpha) * ours == pytest.approx(2.0, rel=1e-3)

    @pytest.mark.parametrize("alpha", [0.5, 1.0])
    def test_truncation_converges_at_order_two_minus_alpha(self, alpha):
        # compact smooth perturbation around r = 1 on a constant-curvature spot
        grid = np.geomspace(1e-4, 1e4, 1024)
        u = fl.radial_from_callable(lambda r: (1 + r * r) ** -2.0, grid,
                                    tail=fl.Tail(4.0, 1.0))
        full = fl.integrate_pv_symmetric(u, 1.0, alpha, 3)
        deltas = np.array([0.4, 0.2, 0.1, 0.05])
        errs = np.array([abs(pv_truncated(u, 1.0, alpha, 3, d) - full) for d in deltas])
        slope = np.polyfit(np.log(deltas), np.log(errs), 1)[0]
        assert slope >= 2.0 - alpha - 0.2
