import json
import math

import numpy as np
import pytest
from scipy import special

import frozen
from berry_esseen import constants as C
from berry_esseen import montecarlo as M
from berry_esseen.geometry import FIGURE_SET, Ball, Empty, HalfSpace

SPECS = [("rademacher-axes", 0.5), ("uniform-sphere", 0.5), ("two-point", 0.2)]


def families(d):
    return {"halfspace": M.halfspace_grid(d, 40, seed=d),
            "ball": M.origin_ball_grid(d, np.linspace(0.25, 4, 16))}


def run(kind, n, d, p, sets, samples=40_000, seed=3):
    return M.run_simulation(M.SimulationConfig(M.SummandSpec(kind, n, d, p), sets, samples, seed))


class TestSummandSpec:
    @pytest.mark.parametrize("kind,p", SPECS)
    @pytest.mark.parametrize("n,d", [(7, 1), (16, 2), (50, 3), (257, 5)])
    def test_covariance_is_identity(self, kind, p, n, d):
        cov = M.SummandSpec(kind, n, d, p).covariance_sum()
        assert np.max(np.abs(cov - np.eye(d))) <= 1e-12

    def test_lyapunov_closed_forms(self):
        assert M.SummandSpec("rademacher-axes", 100, 1).lyapunov_sum == pytest.approx(0.1, abs=1e-15)
        assert M.SummandSpec("uniform-sphere", 50, 2).lyapunov_sum == pytest.approx(50 * (2 / 50) ** 1.5)
        p = 0.2
        spec = M.SummandSpec("two-point", 25, 1, p)
        a, b = spec.two_values
        assert p * a + (1 - p) * b == pytest.approx(0, abs=1e-15)
        assert spec.lyapunov_sum == pytest.approx(25 * (p * a ** 3 + (1 - p) * abs(b) ** 3) / 125, rel=1e-14)

    def test_sphere_summand_norm(self):
        spec = M.SummandSpec("uniform-sphere", 9, 3)
        # |X_i| = sqrt(d/n) exactly
        assert spec.lyapunov_sum == pytest.approx(9 * (3 / 9) ** 1.5, rel=1e-14)

    def test_atom_count(self):
        assert M.SummandSpec("rademacher-axes", 10, 2).atom_count == 36
        assert M.SummandSpec("uniform-sphere", 10, 2).atom_count == math.inf

    @pytest.mark.parametrize("kw", [{"kind": "gamma", "n": 3}, {"kind": "two-point", "n": 3, "p": 1.0},
                                    {"kind": "rademacher-axes", "n": 2, "d": 3},
                                    {"kind": "uniform-sphere", "n": 0}])
    def test_validation(self, kw):
        with pytest.raises(ValueError):
            M.SummandSpec(**kw)


class TestConfig:
    def test_round_trip(self):
        cfg = M.SimulationConfig(M.SummandSpec("two-point", 30, 2, 0.3),
                                 M.halfspace_grid(2, 5) + M.origin_ball_grid(2, [1.0]), 20_000, 7)
        assert M.SimulationConfig.from_json(cfg.to_json()) == cfg
        assert json.loads(cfg.to_json())["seed"] == 7

    def test_rejects_small_mc(self):
        with pytest.raises(ValueError):
            M.SimulationConfig(M.SummandSpec("uniform-sphere", 5, 2), M.halfspace_grid(2, 3), 9_999)

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError):
            M.SimulationConfig(M.SummandSpec("uniform-sphere", 5, 2), [FIGURE_SET])
        with pytest.raises(ValueError):
            M.SimulationConfig(M.SummandSpec("uniform-sphere", 5, 2), [])

    def test_exact_threshold(self):
        assert M.SimulationConfig(M.SummandSpec("rademacher-axes", 60, 3), [Ball(np.zeros(3), 1.0)]).use_exact
        big = M.SummandSpec("rademacher-axes", 3000, 3)
        assert big.atom_count > M.EXACT_LIMIT
        with pytest.raises(ValueError):
            M.SimulationConfig(big, [Ball(np.zeros(3), 1.0)], exact=True)


class TestNormalMeasure:
    def test_halfspace_through_origin(self):
        assert M.normal_measure(HalfSpace((0.6, 0.8), 0.0)) == 0.5

    @pytest.mark.parametrize("r", [0.3, 1.0, 2.5])
    def test_ball_d2(self, r):
        assert M.normal_measure(Ball((0.0, 0.0), r)) == pytest.approx(1 - math.exp(-r * r / 2), abs=1e-14)

    def test_ball_d3_against_qmc(self):
        exact = M.normal_measure(Ball((0.0, 0.0, 0.0), math.sqrt(3)))
        from scipy.stats import qmc
        reps = []
        for s in range(8):
            u = qmc.Sobol(3, scramble=True, seed=100 + s).random(2 ** 17)
            z = special.ndtri(np.clip(u, 1e-300, 1 - 1e-16))
            reps.append(np.mean(np.sum(z * z, axis=1) <= 3))
        est, se = np.mean(reps), np.std(reps, ddof=1) / math.sqrt(8)
        assert abs(est - exact) <= 3 * se + 1e-12

    def test_off_centre_ball(self):
        B = Ball((0.1, 0.0, 0.0), math.sqrt(3))
        val, se = M.normal_measure_with_error(B)
        assert 0 < se < 1e-3
        centred = M.normal_measure(Ball((0.0, 0.0, 0.0), math.sqrt(3)))
        # shifting a ball off the mode lowers its mass slightly
        assert val < centred
        assert val == pytest.approx(centred, abs=0.01)

    def test_interval_union(self):
        assert M.normal_measure(FIGURE_SET) == pytest.approx(frozen.FIGURE_MASS, abs=1e-12)
        assert M.normal_measure(Empty(2)) == 0.0

    def test_wilson(self):
        lo, hi = M.wilson_interval(0, 100)
        assert lo == pytest.approx(0, abs=1e-15) and 0 < hi < 0.1
        lo, hi = M.wilson_interval(500, 1000)
        assert lo < 0.5 < hi and hi - 0.5 == pytest.approx(0.5 - lo)


class TestSimulation:
    def test_binomial_halflines(self):
        rep = run("rademacher-axes", 100, 1, 0.5, M.halfline_grid())
        assert rep.method == "exact"
        assert rep.grid_sup == pytest.approx(frozen.BINOMIAL_SUP[100], abs=1e-12)
        assert rep.k_constant <= 29.3
        assert rep.bound == pytest.approx(rep.k_constant / 10, rel=1e-14)
        assert rep.verdict == "pass"

    @pytest.mark.slow
    def test_uniform_sphere_d2(self):
        rep = run("uniform-sphere", 50, 2, 0.5, M.halfspace_grid(2, 100, seed=0), 10 ** 6, seed=1)
        assert rep.method == "monte-carlo" and rep.verdict == "pass"
        assert rep.grid_sup <= C.convex_class_constant(2).value * rep.lyapunov_sum

    @pytest.mark.parametrize("kind,p", SPECS)
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_verdicts(self, kind, p, d):
        for n in (16, 64, 256):
            for sets in families(d).values():
                rep = run(kind, n, d, p, sets)
                assert rep.verdict == "pass", (kind, n, d, rep.grid_sup, rep.bound)
                assert rep.conservative_sup <= rep.grid_sup

    @pytest.mark.parametrize("kind,p", SPECS)
    @pytest.mark.parametrize("d", [1, 2])
    def test_error_decreases(self, kind, p, d):
        for sets in families(d).values():
            small, big = run(kind, 16, d, p, sets), run(kind, 64, d, p, sets)
            se = math.hypot(small.sup_halfwidth, big.sup_halfwidth) / M.Z99
            assert big.grid_sup <= small.grid_sup + 3 * se

    def test_exact_rate(self):
        errs = [run("rademacher-axes", n, 1, 0.5, M.halfline_grid()).grid_sup for n in (25, 100, 400)]
        assert errs[2] == pytest.approx(frozen.BINOMIAL_SUP[400], abs=1e-12)
        for a, b in zip(errs[:-1], errs[1:]):
            assert 0.4 < b / a < 0.6

    def test_interval_union_family(self):
        rep = run("two-point", 40, 1, 0.3, [FIGURE_SET])
        assert rep.verdict == "pass"
        assert rep.k_constant == pytest.approx(
            C.k_general(M.interval_union_perimeter_bound(FIGURE_SET.delta), 0.5))

    def test_deterministic(self):
        cfg = M.SimulationConfig(M.SummandSpec("uniform-sphere", 30, 2), M.halfspace_grid(2, 10), 30_000, 11)
        a, b = M.run_simulation(cfg), M.run_simulation(cfg)
        assert a.to_json() == b.to_json() and a.to_csv() == b.to_csv()
        c = M.run_simulation(M.SimulationConfig(cfg.spec, cfg.sets, cfg.samples, 12))
        assert c.to_json() != a.to_json()

    def test_worker_count_does_not_matter(self, monkeypatch):
        cfg = M.SimulationConfig(M.SummandSpec("two-point", 3000, 3, 0.3),
                                 M.origin_ball_grid(3, [1.0, 2.0]), 200_000, 5, chunk=16_384)
        monkeypatch.setenv(M.WORKERS_ENV, "1")
        serial = M.run_simulation(cfg).to_json()
        monkeypatch.setenv(M.WORKERS_ENV, "4")
        assert M.run_simulation(cfg).to_json() == serial

    def test_report_round_trip(self):
        rep = run("rademacher-axes", 20, 2, 0.5, M.halfspace_grid(2, 4))
        assert M.SimulationReport.from_json(rep.to_json()) == rep
        lines = rep.to_csv().splitlines()
        assert lines[0] == "set,probability,normal,error,halfwidth" and len(lines) == 5


class TestAnnulusCheck:
    def test_ball_matches_perimeter(self):
        from berry_esseen import perimeter as P
        rep = M.annulus_inequality_check(Ball((0.0, 0.0), 1.0), 1.0, [0.0, 0.0], [0.01],
                                         P.gamma_bar_d(2).gamma_bar, samples=400_000, seed=0)
        assert rep.ok and rep.method == "conditional-mc"
        assert rep.rows[0]["outer_ratio"] == pytest.approx(P.ball_perimeter(1.0, 2), rel=0.02)

    def test_halfspace_shifted(self):
        rep = M.annulus_inequality_check(HalfSpace((0.6, 0.8), 0.3), 0.5, [0.4, -0.2],
                                         [2.0 ** -k for k in range(1, 10)], 1 / math.sqrt(2 * math.pi))
        assert rep.ok and rep.method == "exact"
        for row in rep.rows:
            assert row["outer"] <= row["bound"] and row["outer_margin"] == 0

    def test_figure_set(self):
        bound = 16 / math.sqrt(2 * math.pi) + 4 / FIGURE_SET.delta
        rep = M.annulus_inequality_check(FIGURE_SET, 1.0, [0.0], [2.0 ** -k for k in range(1, 13)], bound)
        assert rep.ok
        assert max(max(r["outer_ratio"], r["inner_ratio"]) for r in rep.rows) == pytest.approx(
            frozen.FIGURE_ANNULUS_SUP, abs=1e-9)

    def test_violation_has_witness(self):
        rep = M.annulus_inequality_check(Ball((0.0,), 1.0), 1.0, [0.0], [0.1, 0.01], 0.1)
        assert not rep.ok and rep.witnesses[0]["epsilon"] == 0.1
        assert json.loads(rep.to_json())["ok"] is False

    def test_sigma_domain(self):
        with pytest.raises(ValueError):
            M.annulus_inequality_check(Ball((0.0,), 1.0), 1.5, [0.0], [0.1], 1.0)
