"""The frozen reference values are still what the independent oracles produce."""

import math

import numpy as np
import pytest

import frozen
import oracles


class TestFrozenValues:
    @pytest.mark.parametrize("x", sorted(frozen.MILLS))
    def test_mills(self, x):
        assert float(oracles.mills(x)) == pytest.approx(frozen.MILLS[x], abs=1e-15)

    @pytest.mark.parametrize("y", sorted(frozen.INF_MILLS))
    def test_inf_mills(self, y):
        assert oracles.inf_mills_grid(y) == pytest.approx(frozen.INF_MILLS[y], abs=1e-14)

    @pytest.mark.parametrize("r", range(4))
    def test_c_r(self, r):
        assert oracles.c_quad(r) == pytest.approx(frozen.C_R[r], abs=1e-15)

    def test_radial_and_xi1(self):
        assert oracles.radial_moment(5, 2.0) == pytest.approx(frozen.RADIAL_5_2, abs=1e-15)
        assert oracles.xi1_quad(1.0, 3, 0.5) == pytest.approx(frozen.XI1_1_3_HALF, abs=1e-15)

    def test_k_of_p(self):
        assert oracles.k_of_p_grid(0.72) == pytest.approx(frozen.K_072, abs=1e-14)

    def test_gamma_bar_brute(self):
        r = np.geomspace(1e-3, math.sqrt(20) + 10, 10_000)
        g, p = oracles.gamma_bar_brute(10, np.array([0.72]), r)
        assert g == pytest.approx(frozen.GAMMA_BAR_10_072, abs=1e-12)
        g, p = oracles.gamma_bar_brute(10, np.linspace(0.001, 1, 1000), r)
        assert g == pytest.approx(frozen.GAMMA_BAR_10_BRUTE, abs=1e-12)

    @pytest.mark.parametrize("n", sorted(frozen.BINOMIAL_SUP))
    def test_binomial(self, n):
        levels = np.arange(-256, 256) / 64
        assert oracles.binomial_halfline_sup(n, levels) == pytest.approx(
            frozen.BINOMIAL_SUP[n], abs=1e-15)

    def test_ball_annulus(self):
        for (d, r, e), v in frozen.BALL_ANNULUS.items():
            assert oracles.ball_annulus_ratio(d, r, e) == pytest.approx(v, rel=1e-13)

    def test_figure_oracles(self):
        assert oracles.interval_mass_quad([(-2, 0), (2, 5)]) == pytest.approx(
            frozen.FIGURE_MASS, abs=1e-14)
        got = oracles.sublevel_intervals(oracles.figure_rho, -0.45)
        np.testing.assert_allclose(got, frozen.FIGURE_EROSION_045, atol=1e-12)
        eps = [2.0 ** -k for k in range(1, 13)]
        assert oracles.figure_annulus_sup(eps) == pytest.approx(frozen.FIGURE_ANNULUS_SUP, abs=1e-10)

    def test_nearest_point_oracle_is_a_distance(self):
        d = oracles.nearest_point_ball(np.zeros(2), 1.0, np.array([2.0, 0.0]))
        assert d == pytest.approx(1.0, abs=1e-4)

