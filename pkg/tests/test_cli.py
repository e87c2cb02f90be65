import json
from pathlib import Path

import numpy as np
import pytest

from combust1d import io
from combust1d.cli import main

BASE_CONFIG = """\
preset.name = smooth-bump
grid.n_cells = 64
solver.dt = 1e-3
solver.t_end = 0.05
output.every_n_steps = 10
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "cfg.txt"
    path.write_text(BASE_CONFIG)
    return path


def run_cli(*args):
    return main([str(a) for a in args])


class TestSimulate:
    def test_successful_run(self, config_file, tmp_path, capsys):
        out = tmp_path / "run"
        assert run_cli("simulate", "--config", config_file, "--out", out) == 0
        assert (out / io.INDEX_NAME).is_file()
        assert (out / io.DIAGNOSTICS_NAME).is_file()
        assert (out / io.SUMMARY_NAME).is_file()
        assert (out / "profiles.png").is_file()
        assert (out / "diagnostics.png").is_file()
        summary = io.read_summary(out / io.SUMMARY_NAME)
        assert all(c["pass"] for c in summary)

    def test_config_error_exits_1_without_outputs(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("preset.name = smooth-bump\npreset.z_max = 1.5\n")
        out = tmp_path / "run"
        assert run_cli("simulate", "--config", bad, "--out", out) == 1
        assert not out.exists()

    def test_unknown_key_exits_1(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("physical.zeta = 1\n")
        assert run_cli("simulate", "--config", bad, "--out", tmp_path / "o") == 1

    def test_invariant_violation_exits_2_with_partial_outputs(
            self, tmp_path, capsys):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text(BASE_CONFIG.replace("solver.dt = 1e-3",
                                           "solver.dt = 2.0")
                       .replace("solver.t_end = 0.05", "solver.t_end = 40.0")
                       + "solver.cfl_safety = 1.0\nphysical.a = 400.0\n")
        out = tmp_path / "run"
        code = run_cli("simulate", "--config", cfg, "--out", out)
        assert code == 2
        # partial trajectory persisted
        assert (out / io.INDEX_NAME).is_file()
        index = json.loads((out / io.INDEX_NAME).read_text())
        assert index["aborted"]

    def test_set_overrides_apply(self, config_file, tmp_path):
        out = tmp_path / "run"
        assert run_cli("simulate", "--config", config_file, "--out", out,
                       "--set", "grid.n_cells=32") == 0
        state = io.read_snapshot(next(out.glob("snapshot_*.csv")))
        assert state.grid.n_cells == 32


class TestDiagnose:
    def test_passing_run_diagnoses_clean(self, config_file, tmp_path):
        out = tmp_path / "run"
        run_cli("simulate", "--config", config_file, "--out", out)
        assert run_cli("diagnose", out) == 0

    def test_tampered_snapshot_exits_2(self, config_file, tmp_path, capsys):
        out = tmp_path / "run"
        run_cli("simulate", "--config", config_file, "--out", out)
        snap = sorted(out.glob("snapshot_*.csv"))[-1]
        lines = snap.read_text().splitlines()
        header = lines[0]
        tampered = [header]
        for line in lines[1:]:
            cols = line.split(",")
            cols[2] = "0"  # zero the v column
            tampered.append(",".join(cols))
        snap.write_text("\n".join(tampered) + "\n")
        assert run_cli("diagnose", out) == 2
        err = capsys.readouterr().err
        assert "v_min" in err

    def test_empty_directory_exits_1(self, tmp_path):
        assert run_cli("diagnose", tmp_path) == 1


class TestVerifyInequalities:
    def test_sound_battery_exits_0(self, tmp_path):
        # the fisher-hessian and bernis bounds hold; a small battery passes
        code = main(["verify-inequalities", "--trials", "5", "--seed", "1",
                     "--out", str(tmp_path)])
        # the default battery includes the reverse check, which carries a
        # genuine counterexample family: expect failure-coded exit
        assert code == 2
        data = json.loads((tmp_path / "battery.json").read_text())
        assert data["checks"]["fisher-hessian"]["passes"] == 5
        assert data["checks"]["bernis"]["passes"] == 5
        assert data["checks"]["reverse"]["passes"] == 0

    def test_zero_trials_usage_error(self, tmp_path):
        assert main(["verify-inequalities", "--trials", "0",
                     "--out", str(tmp_path)]) == 1

    def test_reproducible_json(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        main(["verify-inequalities", "--trials", "3", "--seed", "9", "--out", str(a)])
        main(["verify-inequalities", "--trials", "3", "--seed", "9", "--out", str(b)])
        assert (a / "battery.json").read_bytes() == (b / "battery.json").read_bytes()


class TestAnalyzeNodal:
    def test_clean_trajectory_exits_0(self, config_file, tmp_path):
        out = tmp_path / "run"
        run_cli("simulate", "--config", config_file, "--out", out)
        assert run_cli("analyze-nodal", out) == 0
        report = json.loads((out / "nodal_report.json").read_text())
        assert report["clean"]

    def test_missing_directory_exits_1(self, tmp_path):
        assert run_cli("analyze-nodal", tmp_path / "nowhere") == 1


class TestSweep:
    def test_delta_sweep_collated(self, config_file, tmp_path):
        out = tmp_path / "sweep"
        code = run_cli("sweep", "--config", config_file, "--out", out,
                       "--sweep-set", "physical.delta_shift=1e-3,1e-4",
                       "--jobs", "1")
        assert code == 0
        report = json.loads((out / "sweep_report.json").read_text())
        assert len(report["points"]) == 2
        assert all(p["exit_code"] == 0 for p in report["points"])
        assert "max_fisher_spread" in report

    def test_unknown_sweep_key_exits_1(self, config_file, tmp_path):
        assert run_cli("sweep", "--config", config_file,
                       "--out", tmp_path / "s",
                       "--sweep-set", "bogus.key=1,2") == 1

    def test_no_axes_is_usage_error(self, config_file, tmp_path):
        assert run_cli("sweep", "--config", config_file,
                       "--out", tmp_path / "s") == 1


class TestDeterminism:
    def test_repeat_runs_byte_identical(self, config_file, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_cli("simulate", "--config", config_file, "--out", a)
        run_cli("simulate", "--config", config_file, "--out", b)
        for fa in sorted(a.iterdir()):
            fb = b / fa.name
            assert fb.is_file()
            assert fa.read_bytes() == fb.read_bytes(), fa.name
