"""Command-line entry points.

Exit codes are a stable contract: 0 success, 1 usage/config error, 2
numerical or check failure (with partial outputs persisted where possible).
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import diagnostics, io, nodal, plots
from .config import Config, load_config, validate_config, with_overrides
from .errors import Combust1DError, ConfigError
from .inequalities import run_battery
from .solver import run_simulation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK = 2

# verdicts attached to every simulate/diagnose summary; tolerances are the
# hard run-acceptance bounds (relative mass drift; positivity floors; Z box;
# reactant balance identity)
MASS_DRIFT_TOL = 1e-10
ENERGY_DRIFT_TOL = 1e-4
REACTANT_BALANCE_TOL = 1e-3
Z_BOX_TOL = 1e-12
V_FLOOR = diagnostics.V_FLOOR_DEFAULT
THETA_FLOOR = diagnostics.THETA_FLOOR_DEFAULT


def _check(name: str, value: float, tolerance: float, ok: bool) -> dict:
    return {"check_name": name, "value": float(value),
            "tolerance": float(tolerance), "pass": bool(ok)}


def run_checks(traj) -> list[dict]:
    """Standard verdict list for a trajectory (simulate and diagnose share it)."""
    params = traj.config.physical
    masses = np.array([diagnostics.mass_integral(s) for s in traj.states])
    mass_drift = float(np.max(np.abs(masses - masses[0])) / abs(masses[0]))
    energies = np.array([diagnostics.total_energy(s, params) for s in traj.states])
    scale = max(1.0, abs(energies[0]))
    energy_drift = float(np.max(np.abs(energies - energies[0])) / scale)
    if len(traj.states) >= 2:
        balance = diagnostics.reactant_balance_residual(traj, params)
    else:
        balance = 0.0  # aborted before the first cadence point
    v_min = min(float(np.min(s.v)) for s in traj.states)
    theta_min = min(float(np.min(s.theta)) for s in traj.states)
    z_min = min(float(np.min(s.Z)) for s in traj.states)
    z_max = max(float(np.max(s.Z)) for s in traj.states)
    checks = [
        _check("mass_drift_relative", mass_drift, MASS_DRIFT_TOL,
               mass_drift <= MASS_DRIFT_TOL),
        _check("total_energy_drift", energy_drift, ENERGY_DRIFT_TOL,
               energy_drift <= ENERGY_DRIFT_TOL),
        _check("reactant_balance_residual", balance, REACTANT_BALANCE_TOL,
               balance <= REACTANT_BALANCE_TOL),
        _check("v_min", v_min, V_FLOOR, v_min >= V_FLOOR),
        _check("theta_min", theta_min, THETA_FLOOR, theta_min >= THETA_FLOOR),
        _check("Z_lower", z_min, Z_BOX_TOL, z_min >= -Z_BOX_TOL),
        _check("Z_upper", z_max, 1.0 + Z_BOX_TOL, z_max <= 1.0 + Z_BOX_TOL),
        _check("completed", 0.0 if traj.aborted else 1.0, 1.0, not traj.aborted),
    ]
    return checks


def cmd_simulate(config: Config, out_dir: Path | None = None) -> int:
    out = Path(out_dir) if out_dir is not None else Path(config.out_dir)
    try:
        state0, warnings = validate_config(config)
    except Combust1DError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)

    traj = run_simulation(config, with_records=True)
    io.write_trajectory(out, traj)
    plots.render_report_figures(traj, out)
    checks = run_checks(traj)
    io.write_summary(out / io.SUMMARY_NAME, checks)
    failed = [c for c in checks if not c["pass"]]
    if traj.aborted:
        print(f"run aborted: {traj.error}", file=sys.stderr)
    for c in failed:
        print(f"check failed: {c['check_name']} = {c['value']:.6g} "
              f"(tolerance {c['tolerance']:.6g})", file=sys.stderr)
    return EXIT_CHECK if failed else EXIT_OK


def cmd_diagnose(snapshot_dir: Path) -> int:
    try:
        traj = io.read_trajectory(snapshot_dir)
    except (Combust1DError, OSError, json.JSONDecodeError) as exc:
        print(f"cannot read trajectory: {exc}", file=sys.stderr)
        return EXIT_USAGE

    records = diagnostics.trajectory_records(traj)
    traj.records = records  # recomputed, not trusted from disk
    checks = run_checks(traj)
    io.write_summary(Path(snapshot_dir) / "diagnose_summary.json", checks)
    failed = [c for c in checks if not c["pass"]]
    for c in failed:
        print(f"check failed: {c['check_name']} = {c['value']:.6g} "
              f"(tolerance {c['tolerance']:.6g})", file=sys.stderr)
    return EXIT_CHECK if failed else EXIT_OK


def cmd_verify_inequalities(n_trials: int, seed: int, out_dir: Path) -> int:
    if n_trials < 1:
        print("--trials must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    result = run_battery(n_trials, seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "battery.json").write_text(io.dump_json(result))
    all_pass = all(s["passes"] == s["trials"] for s in result["checks"].values())
    if not all_pass:
        for name, s in result["checks"].items():
            if s["passes"] < s["trials"]:
                print(f"check {name}: {s['trials'] - s['passes']} of "
                      f"{s['trials']} trials failed "
                      f"(worst ratio {s['worst_ratio']:.6g})", file=sys.stderr)
    return EXIT_OK if all_pass else EXIT_CHECK


def cmd_analyze_nodal(snapshot_dir: Path) -> int:
    try:
        traj = io.read_trajectory(snapshot_dir)
    except (Combust1DError, OSError, json.JSONDecodeError) as exc:
        print(f"cannot read trajectory: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = nodal.classify_trajectory(traj)
    (Path(snapshot_dir) / "nodal_report.json").write_text(io.dump_json(report))
    if not report["clean"]:
        print("high-confidence inadmissible nodal candidate found", file=sys.stderr)
    return EXIT_OK if report["clean"] else EXIT_CHECK


# ---------------------------------------------------------------------------
# sweep

def _sweep_point(args):
    config, out_dir = args
    return cmd_simulate(config, out_dir)


def parse_sweep_spec(pairs: list[str]) -> dict:
    """``key=v1,v2,...`` pairs -> ordered mapping key -> list of raw values."""
    spec = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"bad sweep spec {pair!r}; expected key=v1,v2,...")
        key, values = pair.split("=", 1)
        key = key.strip()
        vals = [v.strip() for v in values.split(",") if v.strip()]
        if not vals:
            raise ConfigError(f"sweep key {key!r} has no values")
        spec[key] = vals
    return spec


def cmd_sweep(base_config: Config, spec: dict, out_dir: Path, jobs: int) -> int:
    out_dir = Path(out_dir)
    keys = list(spec)
    points = list(itertools.product(*(spec[k] for k in keys)))
    tasks, labels = [], []
    for idx, combo in enumerate(points):
        overrides = dict(zip(keys, combo))
        cfg = with_overrides(base_config, overrides)  # raises on unknown key
        sub = out_dir / f"point_{idx:04d}"
        tasks.append((cfg, sub))
        labels.append(overrides)

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            codes = list(pool.map(_sweep_point, tasks))
    else:
        codes = [_sweep_point(t) for t in tasks]

    # collated stability report over the swept axes
    rows = []
    for (cfg, sub), overrides, code in zip(tasks, labels, codes):
        entry = {"point": sub.name, "overrides": overrides, "exit_code": code}
        diag_path = sub / io.DIAGNOSTICS_NAME
        if diag_path.is_file():
            recs = io.read_diagnostics_csv(diag_path)
            entry["max_fisher"] = max(r.fisher for r in recs)
            entry["max_lipschitz_v"] = max(r.lipschitz_v for r in recs)
            entry["max_kazhikhov_residual"] = max(r.kazhikhov_residual for r in recs)
        rows.append(entry)
    finite_fisher = [r["max_fisher"] for r in rows
                     if np.isfinite(r.get("max_fisher", np.inf))]
    report = {"axes": {k: spec[k] for k in keys}, "points": rows}
    if finite_fisher:
        lo, hi = min(finite_fisher), max(finite_fisher)
        report["max_fisher_spread"] = (hi - lo) / hi if hi > 0 else 0.0
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "sweep_report.json").write_text(io.dump_json(report))
    return EXIT_OK if all(c == EXIT_OK for c in codes) else EXIT_CHECK


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="combust1d",
        description="Simulator and verification suite for 1D Lagrangian "
                    "reacting compressible flow.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, config=True):
        if config:
            p.add_argument("--config", type=Path, default=None,
                           help="key=value config file")
            p.add_argument("--set", dest="overrides", action="append",
                           default=[], metavar="KEY=VALUE",
                           help="override a config key (repeatable)")
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="RNG seed")

    add_common(sub.add_parser("simulate", help="run a simulation"))
    d = sub.add_parser("diagnose", help="recompute diagnostics from stored snapshots")
    d.add_argument("snapshot_dir", type=Path)
    v = sub.add_parser("verify-inequalities", help="run the inequality battery")
    add_common(v, config=False)
    v.add_argument("--trials", type=int, default=100)
    a = sub.add_parser("analyze-nodal", help="nodal classification of a stored trajectory")
    a.add_argument("snapshot_dir", type=Path)
    s = sub.add_parser("sweep", help="cartesian parameter sweep")
    add_common(s)
    s.add_argument("--sweep-set", dest="sweep", action="append", default=[],
                   metavar="KEY=V1,V2,...", help="swept axis (repeatable)")
    s.add_argument("--jobs", type=int, default=1)
    return parser


def _load(args) -> Config:
    overrides = {}
    for pair in args.overrides:
        if "=" not in pair:
            raise ConfigError(f"bad --set {pair!r}; expected key=value")
        key, value = pair.split("=", 1)
        overrides[key.strip()] = value.strip()
    if args.seed is not None:
        overrides["rng.seed"] = str(args.seed)
    if args.config is not None:
        return load_config(args.config, overrides)
    return with_overrides(Config(), overrides)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.subcommand == "simulate":
            return cmd_simulate(_load(args), args.out)
        if args.subcommand == "diagnose":
            return cmd_diagnose(args.snapshot_dir)
        if args.subcommand == "verify-inequalities":
            seed = args.seed if args.seed is not None else 0
            out = args.out if args.out is not None else Path("out")
            return cmd_verify_inequalities(args.trials, seed, out)
        if args.subcommand == "analyze-nodal":
            return cmd_analyze_nodal(args.snapshot_dir)
        if args.subcommand == "sweep":
            base = _load(args)
            out = args.out if args.out is not None else Path(base.out_dir)
            spec = parse_sweep_spec(args.sweep)
            if not spec:
                print("sweep requires at least one --sweep-set axis", file=sys.stderr)
                return EXIT_USAGE
            return cmd_sweep(base, spec, out, args.jobs)
        raise AssertionError("unreachable")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Combust1DError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        traceback.print_exc()
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
