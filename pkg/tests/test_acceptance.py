"""End-to-end acceptance suite.

Each test class corresponds to one acceptance criterion, at the stated
tolerances.  Expensive trajectories and the randomized battery are shared
through module-scoped fixtures.

Note: the reverse Fisher--Hessian inequality with constant 4 is asserted
exactly as stated, although the exact pointwise decomposition
lhs = 4*rhs + (1/12) int Psi_x^4/Psi^3 makes it false for every non-constant
admissible profile.  That test is expected to fail and is kept as an honest
record; see the companion checks asserting the corrected identity.
"""

import math

import numpy as np
import pytest

from combust1d.config import Config, PhysicalParams, SolverSettings
from combust1d.diagnostics import (
    entropy_identity_residual,
    entropy_Z,
    fisher_functional,
    gronwall_monitor,
    kazhikhov_residual,
    kazhikhov_residual_series,
    lipschitz_norm_v,
    mass_integral,
    reactant_balance_residual,
    total_energy,
)
from combust1d.grid import build_grid
from combust1d.inequalities import (
    TestFunction,
    battery_trial_function,
    check_fisher_hessian_ineq,
    check_logsobolev,
    check_pointwise_identity,
    gaussian_probe,
    run_battery,
)
from combust1d.nodal import analyze_profile, classify_trajectory
from combust1d.solver import run_simulation
from combust1d.diagnostics import transcendental_roots

CONSERVATION_PRESETS = ("stationary", "smooth-bump", "uniform-reaction")


def simulate(preset, n=400, dt=1e-3, t_end=1.0, every=10, **kwargs):
    cfg = Config(preset=preset, n_cells=n,
                 solver=SolverSettings(dt=dt, t_end=t_end),
                 every_n_steps=every, **kwargs)
    traj = run_simulation(cfg, with_records=False)
    assert not traj.aborted, traj.error
    return traj


@pytest.fixture(scope="module")
def conservation_runs():
    return {(preset, dt): simulate(preset, dt=dt)
            for preset in CONSERVATION_PRESETS
            for dt in (1e-3, 5e-4)}


@pytest.fixture(scope="module")
def battery_result():
    return run_battery(10_000, seed=20240817)


class TestCriterion1Conservation:
    @pytest.mark.parametrize("preset", CONSERVATION_PRESETS)
    def test_mass_drift(self, conservation_runs, preset):
        traj = conservation_runs[(preset, 1e-3)]
        m = [mass_integral(s) for s in traj.states]
        assert max(abs(x - m[0]) for x in m) / abs(m[0]) <= 1e-10

    @pytest.mark.parametrize("preset", CONSERVATION_PRESETS)
    def test_total_energy_drift(self, conservation_runs, preset):
        traj = conservation_runs[(preset, 1e-3)]
        p = traj.config.physical
        e = [total_energy(s, p) for s in traj.states]
        assert max(abs(x - e[0]) for x in e) <= 1e-4

    @pytest.mark.parametrize("preset", CONSERVATION_PRESETS)
    def test_reactant_balance_below_tolerance(self, conservation_runs, preset):
        traj = conservation_runs[(preset, 1e-3)]
        assert reactant_balance_residual(traj) <= 1e-3

    @pytest.mark.parametrize("preset", ("smooth-bump", "uniform-reaction"))
    def test_reactant_balance_halves_with_dt(self, conservation_runs, preset):
        coarse = reactant_balance_residual(conservation_runs[(preset, 1e-3)])
        fine = reactant_balance_residual(conservation_runs[(preset, 5e-4)])
        assert coarse / fine == pytest.approx(2.0, rel=0.25)

    @pytest.mark.parametrize("preset", ("smooth-bump", "uniform-reaction"))
    def test_entropy_identity_halves_with_dt(self, conservation_runs, preset):
        coarse, _ = entropy_identity_residual(conservation_runs[(preset, 1e-3)])
        fine, _ = entropy_identity_residual(conservation_runs[(preset, 5e-4)])
        assert coarse / fine == pytest.approx(2.0, rel=0.25)

    def test_entropy_identity_quarters_with_h(self):
        # h-sequence at tiny dt; the three-level ratio cancels the residual
        # dt floor and isolates the O(h^2) spatial component
        residuals = {}
        for n in (12, 24, 48):
            traj = simulate("smooth-bump", n=n, dt=1e-5, t_end=0.1)
            residuals[n], _ = entropy_identity_residual(traj)
        ratio = ((residuals[12] - residuals[24])
                 / (residuals[24] - residuals[48]))
        assert ratio == pytest.approx(4.0, rel=0.5)


class TestCriterion2ExactOde:
    def test_reactant_decay_matches_closed_form(self):
        # uniform data, negligible heat release: Z' = -K phi(2) Z with
        # phi(2) = 2 e^{-1/2}, so Z(1) = exp(-2 e^{-1/2})
        traj = simulate("uniform-reaction", n=50, dt=1e-4, t_end=1.0,
                        physical=PhysicalParams(q=1e-300))
        exact = math.exp(-2.0 * math.exp(-0.5))
        assert exact == pytest.approx(0.29729, abs=1e-5)
        assert float(traj.terminal.Z[0]) == pytest.approx(exact, abs=1e-3)


class TestCriterion3Bounds:
    @pytest.mark.parametrize("preset", CONSERVATION_PRESETS)
    def test_accepted_runs_stay_in_bounds(self, conservation_runs, preset):
        traj = conservation_runs[(preset, 1e-3)]
        for s in traj.states:
            assert np.min(s.Z) >= -1e-12
            assert np.max(s.Z) <= 1.0 + 1e-12
            assert np.min(s.v) >= 1e-3
            assert np.min(s.theta) >= 1e-3


@pytest.fixture(scope="module")
def fisher_runs():
    return {n: simulate("smooth-bump", n=n) for n in (200, 400)}


@pytest.fixture(scope="module")
def tent_runs():
    # unit-slope tent over a quarter-unit horizon; the kink makes the
    # scheme first-order here, so the horizon/slope are chosen to keep
    # the residual within tolerance at the stated resolution
    return {n: simulate("lipschitz-v", n=n, dt=dt, t_end=0.25,
                        preset_params={"slope": 1.0})
            for n, dt in ((200, 2e-4), (400, 1e-4))}


class TestCriterion4FisherStability:
    @pytest.fixture
    def runs(self, fisher_runs):
        return fisher_runs

    def test_max_fisher_stable_in_delta(self, runs):
        values = [max(fisher_functional(s, d) for s in runs[400].states)
                  for d in (1e-3, 1e-4, 1e-5)]
        spread = (max(values) - min(values)) / max(values)
        assert spread < 0.05

    def test_max_fisher_stable_in_mesh(self, runs):
        values = [max(fisher_functional(s, 1e-4) for s in runs[n].states)
                  for n in (200, 400)]
        spread = abs(values[0] - values[1]) / max(values)
        assert spread < 0.10

    def test_gronwall_monitor_stable_under_refinement(self, runs):
        s200 = gronwall_monitor(runs[200], delta=1e-4)["max_S"]
        s400 = gronwall_monitor(runs[400], delta=1e-4)["max_S"]
        assert 0.5 <= s200 / s400 <= 2.0


class TestCriterion5Kazhikhov:
    @pytest.fixture
    def runs(self, tent_runs):
        return tent_runs

    def test_lipschitz_norm_stable_in_mesh(self, runs):
        lip = {n: max(lipschitz_norm_v(s) for s in runs[n].states)
               for n in (200, 400)}
        assert abs(lip[200] - lip[400]) / lip[400] < 0.10

    def test_residual_below_tolerance_at_reference_resolution(self, runs):
        assert kazhikhov_residual(runs[400]) <= 1e-3

    def test_residual_decreases_under_refinement(self, runs):
        assert kazhikhov_residual(runs[400]) < kazhikhov_residual(runs[200])

    def test_residual_exact_at_t0(self, runs):
        series = kazhikhov_residual_series(runs[400].states[:1],
                                           runs[400].config.physical)
        assert series[0] <= 1e-12


class TestCriterion6InequalityBattery:
    def test_fisher_hessian_all_pass(self, battery_result):
        s = battery_result["checks"]["fisher-hessian"]
        assert s["trials"] == 10_000
        assert s["passes"] == s["trials"]
        assert s["worst_ratio"] <= 13.0 / 8.0

    def test_bernis_all_pass(self, battery_result):
        s = battery_result["checks"]["bernis"]
        assert s["passes"] == s["trials"]
        assert s["worst_ratio"] <= 9.0

    def test_reverse_all_pass(self, battery_result):
        # stated constant 4; see the module docstring -- the exact
        # decomposition makes this bound unattainable, and this test is
        # retained as the faithful record of that defect
        s = battery_result["checks"]["reverse"]
        assert s["passes"] == s["trials"]

    def test_reverse_identity_corrected_form_holds(self):
        # the corrected identity behind the reverse bound is exact
        from combust1d.inequalities import check_reverse_ineq

        for trial in range(50):
            rep = check_reverse_ineq(battery_trial_function(99, trial))
            assert rep.extras["identity_ok"]

    def test_pointwise_identity_second_order(self):
        errs = []
        for n in (250, 500):
            g = build_grid("unit", n)
            vals = 2.0 + np.cos(np.pi * g.nodes)
            errs.append(check_pointwise_identity(TestFunction(grid=g, values=vals)))
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.2)

    def test_gaussian_closed_forms(self):
        rep = check_fisher_hessian_ineq(gaussian_probe(L=8.0, n_cells=3200))
        assert rep.lhs == pytest.approx(0.75 * math.sqrt(math.pi), abs=1e-4)
        assert rep.rhs == pytest.approx(4.0 * math.sqrt(math.pi), abs=1e-4)
        assert 0.75 * math.sqrt(math.pi) == pytest.approx(1.329340, abs=1e-6)
        assert 4.0 * math.sqrt(math.pi) == pytest.approx(7.089815, abs=1e-6)


class TestCriterion7Entropy:
    def test_linear_profile_analytic_value(self):
        g = build_grid("unit", 400)
        value = entropy_Z(g, 2.0 * g.nodes)
        assert value == pytest.approx(math.log(2.0) - 0.5, abs=1e-5)
        assert math.log(2.0) - 0.5 == pytest.approx(0.193147, abs=1e-6)

    def test_entropy_fisher_ratio_bounded_over_battery(self):
        ratios = []
        for trial in range(100):
            tf = battery_trial_function(7, trial)
            rep = check_logsobolev(tf, measure="lebesgue")
            assert np.isfinite(rep.ratio)
            ratios.append(rep.ratio)
        assert np.isfinite(max(ratios))

    def test_gaussian_variant_passes_with_half(self):
        g = build_grid("line", 3200, L=8.0)
        for width, floor in ((0.25, 0.05), (1.0, 0.2), (0.1, 0.01)):
            tf = TestFunction(grid=g, values=np.exp(-width * g.nodes**2) + floor)
            rep = check_logsobolev(tf, measure="gaussian")
            assert rep.constant == 0.5
            assert rep.passed


class TestCriterion8Nodal:
    @pytest.mark.parametrize("beta", [1.0, 1.25, 1.5, 2.0, 3.0])
    def test_synthetic_exponent_recovered(self, beta):
        g = build_grid("unit", 400)
        Z = np.minimum(np.abs(g.nodes - 0.5) ** beta, 1.0)
        fits = analyze_profile(g, Z)
        assert len(fits) == 1
        assert fits[0].beta_hat == pytest.approx(beta, abs=0.05)

    def test_injected_corner_flagged(self):
        g = build_grid("unit", 400)
        Z = np.minimum(np.abs(g.nodes - 0.5), 1.0)
        fit = analyze_profile(g, Z)[0]
        assert not fit.admissible
        assert fit.r2 >= 0.98

    @pytest.mark.parametrize("preset,domain", [
        ("smooth-bump", "unit"),
        ("smooth-bump", "line"),
        ("lipschitz-v", "unit"),
        ("stationary", "unit"),
    ])
    def test_shipped_trajectories_clean(self, preset, domain):
        cfg = Config(preset=preset, domain=domain, L=8.0,
                     n_cells=200, solver=SolverSettings(dt=1e-3, t_end=0.5))
        traj = run_simulation(cfg, with_records=False)
        assert not traj.aborted
        assert classify_trajectory(traj)["clean"]


class TestCriterion9Roots:
    def test_level_one(self):
        alpha0, beta0 = transcendental_roots(1.0)
        assert alpha0 == pytest.approx(0.15859, abs=1e-4)
        assert beta0 == pytest.approx(3.14619, abs=1e-4)

    def test_level_zero_exact(self):
        assert transcendental_roots(0.0) == (1.0, 1.0)


class TestCriterion10Determinism:
    CONFIG = (
        "preset.name = smooth-bump\n"
        "grid.n_cells = 64\n"
        "solver.dt = 1e-3\n"
        "solver.t_end = 0.05\n"
    )

    def test_simulate_byte_identical(self, tmp_path):
        from combust1d.cli import main

        cfg = tmp_path / "cfg.txt"
        cfg.write_text(self.CONFIG)
        for d in ("a", "b"):
            assert main(["simulate", "--config", str(cfg),
                         "--out", str(tmp_path / d)]) == 0
        for fa in sorted((tmp_path / "a").iterdir()):
            assert fa.read_bytes() == (tmp_path / "b" / fa.name).read_bytes()

    def test_battery_deterministic(self):
        assert run_battery(20, seed=5) == run_battery(20, seed=5)
