import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import frozen
from berry_esseen import stein as S
from berry_esseen._golden import ConvergenceError

SUITE = [S.sine(0.3), S.tanh_cubic(0.4), S.gaussian_bump(0.5), S.sine(), S.gaussian_bump()]
# entire functions: Gauss-Hermite converges geometrically
ANALYTIC = [S.sine(0.3), S.gaussian_bump(0.5), S.gaussian_bump()]


def square():
    return S.SmoothTestFunction.univariate(lambda x: x * x, math.inf, "square")


def binomial_mean(fn, n):
    # independent of DiscreteSum: integer enumeration of sign counts
    return sum(math.comb(n, k) * fn((2 * k - n) / math.sqrt(n)) for k in range(n + 1)) / 2 ** n


class TestDiscreteSum:
    @pytest.mark.parametrize("n", [1, 4, 9, 20, 101])
    def test_exact_moments(self, n):
        mean, var = S.DiscreteSum(n).exact_moments()
        assert mean == 0 and var == Fraction(1)

    def test_weights(self):
        W = S.DiscreteSum(12)
        assert W.weights.sum() == pytest.approx(1.0, abs=1e-15)
        assert W.expect(lambda x: x ** 4) == pytest.approx(3 - 2 / 12, abs=1e-13)

    def test_domain(self):
        with pytest.raises(ValueError):
            S.DiscreteSum(0)


class TestTestFunctions:
    @pytest.mark.parametrize("f", SUITE + [S.sign_function()])
    def test_oscillation(self, f):
        rng = np.random.default_rng(0)
        x, y = rng.normal(scale=3, size=(2, 5000, 1))
        assert np.all(np.abs(f(x) - f(y)) <= 2 * f.m0 + 1e-15)


class TestUAlpha:
    @pytest.mark.parametrize("f", ANALYTIC)
    def test_endpoints(self, f):
        assert S.u_alpha(f, 0.0, [0.7]) == float(f(np.array([0.7])))
        mean = S.gaussian_mean(f)
        for w in (-2.0, 0.0, 1.3):
            assert S.u_alpha(f, math.pi / 2, [w]) == pytest.approx(mean, abs=1e-14)

    def test_sine_mean(self):
        assert S.gaussian_mean(S.sine(0.3)) == pytest.approx(math.exp(-0.5) * math.sin(0.3), abs=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0, math.pi / 2), st.floats(-4, 4))
    def test_second_moment(self, a, w):
        want = w * w * math.cos(a) ** 2 + math.sin(a) ** 2
        assert S.u_alpha(square(), a, [w]) == pytest.approx(want, abs=1e-12)

    def test_two_dimensional(self):
        f = S.SmoothTestFunction(lambda x: np.cos(x[..., 0]) * np.cos(x[..., 1]), 1.0, 2)
        a, w = 0.6, np.array([0.4, -1.1])
        s = math.sin(a)
        want = math.exp(-s * s) * math.cos(w[0] * math.cos(a)) * math.cos(w[1] * math.cos(a))
        assert S.u_alpha(f, a, w) == pytest.approx(want, abs=1e-13)

    def test_domain(self):
        f3 = S.SmoothTestFunction(lambda x: x[..., 0], 1.0, 3)
        with pytest.raises(ValueError):
            S.u_alpha(f3, 0.3, np.zeros(3))
        with pytest.raises(ValueError):
            S.u_alpha(S.sine(), 0.3, [0.0], nodes=16)

    @pytest.mark.parametrize("f", ANALYTIC)
    def test_node_doubling(self, f):
        for a in (0.2, 0.9, 1.4):
            for w in (-1.5, 0.3, 2.0):
                assert abs(S.u_alpha(f, a, [w], 64) - S.u_alpha(f, a, [w], 128)) < 1e-9

    @pytest.mark.parametrize("f", ANALYTIC)
    def test_continuous_in_alpha(self, f):
        W = S.DiscreteSum(8)
        grid = np.linspace(0, math.pi / 2, 401)
        vals = np.array([W.expect(lambda x: np.array([S.u_alpha(f, a, [t]) for t in x])) for a in grid])
        # Lipschitz in alpha with modulus at most |f'|(|W| + |Z|) ~ a few units
        assert np.max(np.abs(np.diff(vals))) <= 5 * (grid[1] - grid[0])


class TestSteinApply:
    def test_half_square(self):
        g = S.SmoothTestFunction.univariate(lambda x: x * x / 2, math.inf)
        for w in (-2.0, 0.0, 0.5, 3.0):
            assert S.stein_apply(g, [w]) == pytest.approx(1 - w * w, abs=1e-4)

    def test_analytic_derivatives(self):
        for w in (-1.0, 0.4, 2.2):
            assert S.stein_apply(S.sine(), [w]) == pytest.approx(-math.sin(w) - w * math.cos(w), abs=1e-14)

    def test_constant(self):
        for w in (-3.0, 0.0, 1.0):
            assert S.stein_apply(S.constant(2.5), [w]) == 0.0

    @pytest.mark.parametrize("g", [S.sine(), S.sine(0.3), S.gaussian_bump(0.5)])
    def test_gaussian_characterization(self, g):
        assert abs(S.stein_mean_by_quadrature(g)) <= 1e-8

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    def test_characterization_by_finite_differences(self):
        # a 1e-5 second difference carries ~1e-6 roundoff pointwise
        assert abs(S.stein_mean_by_quadrature(S.tanh_cubic(0.4))) <= 1e-6


class TestSlepian:
    def test_constant(self):
        c = S.slepian_identity_check(S.constant(), S.DiscreteSum(8))
        assert c.lhs == pytest.approx(0, abs=1e-14) and c.rhs == pytest.approx(0, abs=1e-14)

    def test_sine_n8(self):
        f = S.sine(0.3)
        c = S.slepian_identity_check(f, S.DiscreteSum(8))
        lhs = binomial_mean(lambda x: math.sin(x + 0.3), 8) - math.exp(-0.5) * math.sin(0.3)
        assert c.lhs == pytest.approx(lhs, abs=1e-14)
        assert c.gap <= 1e-4

    def test_identity(self):
        c = S.slepian_identity_check(S.identity(), S.DiscreteSum(8))
        assert abs(c.lhs) <= 1e-12 and abs(c.rhs) <= 1e-6

    @pytest.mark.parametrize("n", [4, 8, 12])
    @pytest.mark.parametrize("f", SUITE, ids=lambda f: f.name)
    def test_suite(self, f, n):
        c = S.slepian_identity_check(f, S.DiscreteSum(n))
        assert c.gap <= 1e-4

    def test_bump_lhs_oracle(self):
        c = S.slepian_identity_check(S.gaussian_bump(), S.DiscreteSum(12))
        want = binomial_mean(lambda x: math.exp(-x * x), 12) - 1 / math.sqrt(3)
        assert c.lhs == pytest.approx(want, abs=1e-14)

    def test_integrand_ends(self):
        w = np.array([-1.0, 0.5, 2.0])
        ends = S.slepian_integrand(S.sine(0.3), np.array([1e-9, math.pi / 2]), w)
        assert np.all(np.abs(ends[0]) <= 1e-6)
        np.testing.assert_allclose(ends[1], -w * math.exp(-0.5) * math.cos(0.3), atol=1e-14)

    def test_domain(self):
        with pytest.raises(ValueError):
            S.slepian_identity_check(S.sine(), S.DiscreteSum(21))
        with pytest.raises(ValueError):
            S.slepian_identity_check(S.constant(d=2), S.DiscreteSum(4))

    def test_divergence_reports_partials(self):
        with pytest.raises(ConvergenceError) as info:
            S.slepian_identity_check(S.sine(0.3), S.DiscreteSum(8), alpha_nodes=4, tol=1e-30, max_nodes=16)
        assert info.value.diagnostics["partial"]


class TestPairing:
    def test_constant(self):
        for r in (1, 2, 3):
            chk = S.derivative_pairing_check(S.constant(), r, [1.5])
            assert abs(chk.integral) <= 1e-12

    def test_sign_saturates(self):
        chk = S.derivative_pairing_check(S.sign_function(), 1, [1.0])
        assert chk.integral == pytest.approx(-2 / math.sqrt(2 * math.pi), abs=1e-9)
        assert abs(abs(chk.integral) - chk.bound) <= 1e-6
        assert chk.ok

    def test_sine_2d(self):
        f = S.SmoothTestFunction(lambda x: np.sin(x[..., 0]), 1.0, 2, True, "sin")
        chk = S.derivative_pairing_check(f, 3, [2.0, 0.0])
        # int sin(t) phi'''(t) dt = -int cos(t) phi''(t) dt = ... = e^{-1/2}
        assert chk.integral == pytest.approx(8 * math.exp(-0.5), abs=1e-9)
        assert chk.bound == pytest.approx(frozen.C_R[3] * 8, abs=1e-12)
        assert chk.ok

    def test_domain(self):
        with pytest.raises(ValueError):
            S.derivative_pairing_check(S.sine(), 4, [1.0])
        with pytest.raises(ValueError):
            S.derivative_pairing_check(S.sine(), 1, [11.0])

    def test_suite(self):
        cases = S.pairing_suite(100, seed=0)
        assert len(cases) == 100
        assert {f.name for f, _, _ in cases} >= {"step", "sinusoid", "clipped_poly", "staircase"}
        worst = 0.0
        for f, r, u in cases:
            chk = S.derivative_pairing_check(f, r, u)
            assert chk.ok, (f.name, r, u, chk)
            worst = max(worst, abs(chk.integral) / chk.bound)
        assert 0.5 < worst <= 1 + 1e-8
