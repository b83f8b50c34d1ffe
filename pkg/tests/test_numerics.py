"""Kernel tests against independent high-precision oracles.

mpmath supplies series/continued-fraction reference values for the
distribution and special functions; root/optimizer results are checked
against bisection and grid-search oracles plus the defining equations.
"""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bayespower.errors import (
    ConvergenceError,
    FactorizationError,
    InvalidArgumentError,
    OptimizationError,
)
from bayespower.numerics import (
    Bracket,
    BracketVerdict,
    brent_root,
    cholesky_lower,
    digamma,
    empirical_quantile,
    expand_bracket,
    local_maximize,
    log_gamma,
    reg_inc_gamma_lower,
    reg_inc_gamma_upper,
    std_normal_cdf,
    std_normal_quantile,
    trigamma,
)

mpmath.mp.dps = 40


def phi_oracle(z: float) -> float:
    """Reference normal CDF via mpmath's arbitrary-precision erf."""
    return float(0.5 * (1 + mpmath.erf(mpmath.mpf(z) / mpmath.sqrt(2))))


class TestStdNormalCdf:
    def test_zero(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_infinities(self):
        assert std_normal_cdf(math.inf) == 1.0
        assert std_normal_cdf(-math.inf) == 0.0

    def test_against_high_precision_oracle(self):
        for z in np.linspace(-8, 8, 161):
            assert std_normal_cdf(float(z)) == pytest.approx(phi_oracle(float(z)), abs=1e-13)

    def test_quantile_point(self):
        # 0.975 quantile of the standard normal, from the erf oracle
        assert std_normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-6)

    def test_nan_rejected(self):
        with pytest.raises(InvalidArgumentError):
            std_normal_cdf(float("nan"))

    @given(st.floats(-30, 30))
    def test_symmetry_identity(self, z):
        assert std_normal_cdf(z) + std_normal_cdf(-z) == pytest.approx(1.0, abs=1e-12)


class TestStdNormalQuantile:
    def test_half(self):
        assert std_normal_quantile(0.5) == 0.0

    def test_known_value(self):
        # inverted from the CDF oracle by bisection
        lo, hi = 0.0, 4.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if phi_oracle(mid) < 0.975:
                lo = mid
            else:
                hi = mid
        assert std_normal_quantile(0.975) == pytest.approx(0.5 * (lo + hi), abs=1e-6)
        assert std_normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-6)

    @given(st.floats(1e-12, 1 - 1e-12))
    @settings(max_examples=200)
    def test_round_trip(self, p):
        assert std_normal_cdf(std_normal_quantile(p)) == pytest.approx(p, abs=1e-10)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.5, 2.0, float("nan")])
    def test_domain(self, p):
        with pytest.raises(InvalidArgumentError):
            std_normal_quantile(p)


class TestSpecialFunctions:
    def test_log_gamma_oracle(self):
        for x in [0.5, 1.0, 2.11, 5.0, 34.23, 120.0]:
            assert log_gamma(x) == pytest.approx(float(mpmath.loggamma(x)), rel=1e-12)

    def test_digamma_trigamma_oracle(self):
        for x in [0.3, 1.0, 2.43, 10.0, 105.31]:
            assert digamma(x) == pytest.approx(float(mpmath.digamma(x)), rel=1e-10, abs=1e-12)
            assert trigamma(x) == pytest.approx(
                float(mpmath.polygamma(1, x)), rel=1e-10
            )

    def test_trigamma_one_is_pi_squared_over_six(self):
        assert trigamma(1.0) == pytest.approx(math.pi**2 / 6.0, rel=1e-12)

    def test_incomplete_gamma_oracle(self):
        for a in [0.5, 1.0, 2.11, 7.3]:
            for x in [0.1, 1.0, 2.96, 10.0]:
                q_ref = float(mpmath.gammainc(a, x, mpmath.inf, regularized=True))
                assert reg_inc_gamma_upper(a, x) == pytest.approx(q_ref, rel=1e-10, abs=1e-14)
                assert reg_inc_gamma_lower(a, x) == pytest.approx(1 - q_ref, rel=1e-10)

    def test_exponential_closed_form(self):
        # shape 1 reduces to exp(-x)
        assert reg_inc_gamma_upper(1.0, 2.5) == pytest.approx(math.exp(-2.5), rel=1e-12)


class TestCholesky:
    def test_identity(self):
        np.testing.assert_allclose(cholesky_lower(np.eye(3)), np.eye(3))

    def test_two_by_two(self):
        m = np.array([[4.0, 2.0], [2.0, 3.0]])
        lower = cholesky_lower(m)
        np.testing.assert_allclose(lower, [[2.0, 0.0], [1.0, math.sqrt(2.0)]])
        np.testing.assert_allclose(lower @ lower.T, m, atol=1e-12)

    def test_reconstruction_random_spd(self):
        rng = np.random.default_rng(3)
        for k in (2, 3, 6):
            a = rng.normal(size=(k, k))
            m = a @ a.T + k * np.eye(k)
            lower = cholesky_lower(m)
            err = np.max(np.abs(lower @ lower.T - m))
            assert err <= 1e-10 * np.max(np.abs(m))

    def test_indefinite_raises_with_pivot(self):
        with pytest.raises(FactorizationError) as exc:
            cholesky_lower(np.array([[1.0, 2.0], [2.0, 1.0]]))
        assert exc.value.pivot == 1

    def test_asymmetric_rejected(self):
        with pytest.raises(InvalidArgumentError):
            cholesky_lower(np.array([[1.0, 0.5], [0.2, 1.0]]))


def bisection_oracle(f, lo, hi, iters=80):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) * flo <= 0:
            hi = mid
        else:
            lo = mid
            flo = f(lo)
    return 0.5 * (lo + hi)


class TestBrentRoot:
    def test_linear(self):
        f = lambda x: x - 3.0
        root = brent_root(f, Bracket(0.0, 10.0, f(0.0), f(10.0)), tol_x=1e-12)
        assert root == pytest.approx(3.0, abs=1e-10)

    def test_sqrt_two_vs_bisection(self):
        f = lambda x: x * x - 2.0
        ref = bisection_oracle(f, 1.0, 2.0)
        root = brent_root(f, Bracket(1.0, 2.0, f(1.0), f(2.0)), tol_x=1e-10)
        assert root == pytest.approx(ref, abs=1e-9)
        assert root == pytest.approx(1.4142136, abs=1e-7)
        # the root satisfies its defining equation
        assert abs(f(root)) < 1e-9

    def test_no_sign_change_rejected(self):
        with pytest.raises(InvalidArgumentError):
            Bracket(0.0, 1.0, 1.0, 2.0)

    def test_never_leaves_bracket(self):
        seen = []

        def f(x):
            seen.append(x)
            return math.tan(x) - 1.0

        root = brent_root(f, Bracket(0.0, 1.5, f(0.0), f(1.5)), tol_x=1e-12)
        assert all(0.0 <= x <= 1.5 for x in seen)
        assert root == pytest.approx(math.pi / 4.0, abs=1e-9)

    def test_max_iter_carries_best(self):
        f = lambda x: x**3 - 2.0
        with pytest.raises(ConvergenceError) as exc:
            brent_root(f, Bracket(0.0, 2.0, f(0.0), f(2.0)), tol_x=0.0, tol_f=0.0, max_iter=3)
        assert exc.value.best_x is not None
        assert 0.0 <= exc.value.best_x <= 2.0

    def test_tol_f_early_exit(self):
        calls = []

        def f(x):
            calls.append(x)
            return x - 1.0

        brent_root(f, Bracket(0.0, 3.0, -1.0, 2.0), tol_x=1e-300, tol_f=0.5)
        assert len(calls) <= 3


class TestExpandBracket:
    def test_downward_expansion(self):
        f = lambda x: x - 3.0
        out = expand_bracket(f, 300.0, 1e-3, 1e6)
        assert isinstance(out, Bracket)
        assert out.lo <= 3.0 <= out.hi

    def test_constant_positive_sign(self):
        out = expand_bracket(lambda x: 1.0 + 0 * x, 10.0, 2.0, 100.0)
        assert out is BracketVerdict.ROOT_BELOW_LO_MIN

    def test_constant_negative_sign(self):
        out = expand_bracket(lambda x: -1.0 + 0 * x, 10.0, 2.0, 100.0)
        assert out is BracketVerdict.ROOT_ABOVE_HI_MAX

    def test_power_gap_shape(self):
        # root of Phi(0.05 sqrt(x)) - 0.9 at x = (z_0.9 / 0.05)^2, by closed form
        f = lambda x: std_normal_cdf(0.05 * math.sqrt(x)) - 0.9
        x_ref = (std_normal_quantile(0.9) / 0.05) ** 2
        out = expand_bracket(f, 100.0, 2.0, 1e6)
        assert isinstance(out, Bracket)
        assert out.lo <= x_ref <= out.hi
        root = brent_root(f, out, tol_x=1e-8)
        assert root == pytest.approx(x_ref, rel=1e-6)
        assert x_ref == pytest.approx(657, abs=1.0)

    def test_bad_ordering(self):
        with pytest.raises(InvalidArgumentError):
            expand_bracket(lambda x: x, 1.0, 2.0, 3.0)


class TestLocalMaximize:
    def test_start_at_optimum(self):
        target = np.array([1.5, -2.0])
        obj = lambda x: -float(np.sum((x - target) ** 2))
        out = local_maximize(obj, target, tol=1e-10)
        np.testing.assert_allclose(out, target, atol=1e-8)

    def test_quartic_vs_grid_oracle(self):
        # flat curvature at the optimum: the gradient-norm stop needs a
        # tight tol before |x - 2| <= 1e-4 is implied
        obj = lambda x: -float((x[0] - 2.0) ** 4)
        grid = np.linspace(-1, 5, 600001)
        ref = grid[np.argmax(-((grid - 2.0) ** 4))]
        out = local_maximize(obj, np.array([0.0]), tol=1e-12, max_iter=500)
        assert out[0] == pytest.approx(ref, abs=1e-4)
        assert out[0] == pytest.approx(2.0, abs=1e-4)

    def test_nan_objective(self):
        with pytest.raises(OptimizationError):
            local_maximize(lambda x: float("nan"), np.array([0.0]))

    def test_analytic_derivatives_path(self):
        m = np.array([[3.0, 1.0], [1.0, 2.0]])
        b = np.array([1.0, -1.0])
        obj = lambda x: -0.5 * float(x @ m @ x) + float(b @ x)
        out = local_maximize(
            obj,
            np.zeros(2),
            tol=1e-12,
            grad=lambda x: -m @ x + b,
            hess=lambda x: -m,
        )
        np.testing.assert_allclose(out, np.linalg.solve(m, b), atol=1e-10)


class TestEmpiricalQuantile:
    def test_order_statistic_convention(self):
        values = np.arange(1.0, 101.0)
        assert empirical_quantile(values, 0.6) == 60.0

    def test_extremes(self):
        values = np.array([3.0, 5.0, 9.0])
        assert empirical_quantile(values, 1.0) == 9.0
        assert empirical_quantile(values, 1e-9) == 3.0

    def test_empty_rejected(self):
        with pytest.raises(InvalidArgumentError):
            empirical_quantile(np.array([]), 0.5)

    @given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=60), st.floats(0.01, 1.0))
    @settings(max_examples=100)
    def test_returns_member_and_rank(self, values, level):
        values = sorted(values)
        out = empirical_quantile(values, level)
        assert out in values
        k = math.ceil(level * len(values))
        assert out == values[k - 1]


class TestExpandBracketZeroHit:
    def test_exact_zero_at_start_returns_degenerate_bracket(self):
        f = lambda x: 0.0 if x == 5.0 else x - 5.0
        out = expand_bracket(f, 5.0, 2.0, 100.0)
        assert isinstance(out, Bracket)
        assert out.lo == 5.0
        assert out.f_lo == 0.0
        root = brent_root(f, out, tol_x=1e-9)
        assert root == 5.0
