"""Deterministic on-disk formats: per-instant CSV snapshots, a JSON trajectory
index, a diagnostics CSV, and JSON summary verdicts.

All floats are written with 17 significant digits so a read-back reproduces
the in-memory doubles exactly; no timestamps or environment data are emitted,
making re-runs byte-identical.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .config import Config, State, config_to_kv, parse_kv_text, config_from_kv
from .diagnostics import DiagnosticsRecord
from .errors import ConfigError
from .grid import Grid, build_grid

FMT = "%.17g"
INDEX_NAME = "index.json"
CONFIG_NAME = "config.txt"
DIAGNOSTICS_NAME = "diagnostics.csv"
SUMMARY_NAME = "summary.json"
SNAPSHOT_COLUMNS = ("t", "y", "v", "u", "theta", "Z")


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def kv_to_text(kv: dict) -> str:
    lines = []
    for key in sorted(kv):
        value = kv[key]
        if isinstance(value, float):
            value = FMT % value
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def write_snapshot(path: Path, state: State) -> None:
    rows = [",".join(SNAPSHOT_COLUMNS)]
    for i in range(state.grid.nodes.size):
        rows.append(",".join(FMT % x for x in (
            state.t, state.grid.nodes[i], state.v[i], state.u[i],
            state.theta[i], state.Z[i])))
    _atomic_write_text(Path(path), "\n".join(rows) + "\n")


def read_snapshot(path: Path, grid: Grid | None = None) -> State:
    path = Path(path)
    lines = path.read_text().strip().splitlines()
    if not lines or tuple(lines[0].split(",")) != SNAPSHOT_COLUMNS:
        raise ConfigError(f"{path}: not a snapshot file (bad header)")
    data = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    if data.ndim != 2 or data.shape[1] != len(SNAPSHOT_COLUMNS):
        raise ConfigError(f"{path}: malformed snapshot rows")
    t, y = data[:, 0], data[:, 1]
    if grid is None:
        n = y.size - 1
        if abs(y[0]) < 1e-14 and abs(y[-1] - 1.0) < 1e-14:
            grid = build_grid("unit", n)
        else:
            grid = build_grid("line", n, L=float(y[-1]))
    return State(t=float(t[0]), grid=grid, v=data[:, 2], u=data[:, 3],
                 theta=data[:, 4], Z=data[:, 5])


def snapshot_name(step_index: int) -> str:
    return f"snapshot_{step_index:06d}.csv"


def write_trajectory(out_dir: Path, traj) -> dict:
    """Persist config, snapshots, index, and diagnostics; returns the index."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    _atomic_write_text(out_dir / CONFIG_NAME, kv_to_text(config_to_kv(traj.config)))
    entries = []
    for k, state in enumerate(traj.states):
        name = snapshot_name(k)
        write_snapshot(out_dir / name, state)
        entries.append({"file": name, "t": state.t})
    index = {
        "config": CONFIG_NAME,
        "snapshots": entries,
        "aborted": bool(traj.aborted),
        "error": traj.error,
        "diagnostics": DIAGNOSTICS_NAME if traj.records else None,
    }
    if traj.records:
        write_diagnostics_csv(out_dir / DIAGNOSTICS_NAME, traj.records)
    _atomic_write_text(out_dir / INDEX_NAME, dump_json(index))
    return index


def read_trajectory(out_dir: Path):
    """Rebuild a Trajectory from an index directory (re-verification path)."""
    from .solver import Trajectory

    out_dir = Path(out_dir)
    index_path = out_dir / INDEX_NAME
    if not index_path.is_file():
        raise ConfigError(f"{out_dir}: no trajectory index found")
    index = json.loads(index_path.read_text())
    kv = parse_kv_text((out_dir / index["config"]).read_text())
    config = config_from_kv(kv)
    states = [read_snapshot(out_dir / entry["file"])
              for entry in index["snapshots"]]
    if not states:
        raise ConfigError(f"{out_dir}: index lists no snapshots")
    records = []
    if index.get("diagnostics"):
        records = read_diagnostics_csv(out_dir / index["diagnostics"])
    return Trajectory(config=config, states=states, records=records,
                      aborted=bool(index.get("aborted", False)),
                      error=index.get("error"))


def write_diagnostics_csv(path: Path, records: list[DiagnosticsRecord]) -> None:
    names = DiagnosticsRecord.field_names()
    rows = [",".join(names)]
    for rec in records:
        rows.append(",".join(FMT % getattr(rec, n) for n in names))
    _atomic_write_text(Path(path), "\n".join(rows) + "\n")


def read_diagnostics_csv(path: Path) -> list[DiagnosticsRecord]:
    path = Path(path)
    lines = path.read_text().strip().splitlines()
    names = DiagnosticsRecord.field_names()
    if not lines or lines[0].split(",") != list(names):
        raise ConfigError(f"{path}: not a diagnostics file (bad header)")
    out = []
    for line in lines[1:]:
        vals = [float(x) for x in line.split(",")]
        if len(vals) != len(names):
            raise ConfigError(f"{path}: malformed diagnostics row")
        out.append(DiagnosticsRecord(**dict(zip(names, vals))))
    return out


def write_summary(path: Path, checks: list[dict]) -> None:
    """Summary verdicts: list of {check_name, value, tolerance, pass}."""
    for c in checks:
        missing = {"check_name", "value", "tolerance", "pass"} - set(c)
        if missing:
            raise ConfigError(f"summary entry missing keys: {sorted(missing)}")
    _atomic_write_text(Path(path), dump_json({"checks": checks}))


def read_summary(path: Path) -> list[dict]:
    return json.loads(Path(path).read_text())["checks"]
