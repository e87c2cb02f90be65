"""Local-exponent analysis of the reactant fraction near its near-zero minima.

A solution profile cannot vanish like C|y - y*|^beta with beta in [0, 1]
(cusps and corners are excluded); this module estimates beta by a log-log
least-squares fit around each near-zero local minimum and flags fits that
contradict that exclusion with high confidence.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .grid import Grid
from .errors import ConfigError

FLOOR = 1e-30
BETA_ADMISSIBLE = 1.05
R2_CONFIDENT = 0.98
MIN_SIDE_NODES = 6
DEFAULT_HALF_WIDTH = 12
EXCLUDED_NEAREST = 2
MERGE_DISTANCE_CELLS = 12


@dataclass(frozen=True)
class NodalCandidate:
    y_star: float
    z_min: float
    index: int
    window: tuple[int, int]  # [lo, hi) node index range used for fitting
    beta_hat: float = np.nan
    r2: float = np.nan
    admissible: bool = True
    degenerate: bool = False


def find_nodal_candidates(grid: Grid, Z: np.ndarray, zero_threshold: float,
                          half_width: int = DEFAULT_HALF_WIDTH) -> list[NodalCandidate]:
    """Near-zero local minima of Z, interior by >= 6 nodes, merged within 12h."""
    Z = np.asarray(Z, dtype=float)
    if np.min(Z) < 0 or np.max(Z) > 1:
        raise ConfigError("nodal analysis expects 0 <= Z <= 1")
    n = Z.size
    if half_width < MIN_SIDE_NODES:
        raise ConfigError(f"fit half-width must be >= {MIN_SIDE_NODES}")

    minima = []
    i = MIN_SIDE_NODES
    while i < n - MIN_SIDE_NODES:
        if Z[i] > zero_threshold or Z[i] > Z[i - 1]:
            i += 1
            continue
        # walk to the end of a flat run and represent it by its midpoint
        j = i
        while j + 1 < n - MIN_SIDE_NODES and Z[j + 1] == Z[i]:
            j += 1
        if Z[min(j + 1, n - 1)] >= Z[i]:
            minima.append((i + j) // 2)
        i = j + 1

    # merge minima closer than 12 cells, keeping the deeper one
    merged: list[int] = []
    for i in minima:
        if merged and i - merged[-1] < MERGE_DISTANCE_CELLS:
            if Z[i] < Z[merged[-1]]:
                merged[-1] = i
        else:
            merged.append(i)

    out = []
    for i in merged:
        lo = max(0, i - half_width)
        hi = min(n, i + half_width + 1)
        out.append(NodalCandidate(
            y_star=float(grid.nodes[i]), z_min=float(Z[i]),
            index=i, window=(lo, hi)))
    return out


def fit_local_exponent(grid: Grid, Z: np.ndarray, candidate: NodalCandidate,
                       zero_threshold: float) -> NodalCandidate:
    """Least-squares slope of log(Z - z_min + floor) vs log|y - y*| over the
    window, excluding the 2 nodes nearest y* (lower-order contamination)."""
    Z = np.asarray(Z, dtype=float)
    lo, hi = candidate.window
    idx = np.arange(lo, hi)
    dist = np.abs(idx - candidate.index)
    keep = dist > EXCLUDED_NEAREST
    idx = idx[keep]

    vals = Z[idx] - candidate.z_min + FLOOR
    if np.all(vals == vals[0]):
        return replace(candidate, beta_hat=np.nan, r2=0.0,
                       admissible=candidate.z_min > zero_threshold,
                       degenerate=True)
    logx = np.log(np.abs(grid.nodes[idx] - candidate.y_star))
    logy = np.log(vals)
    slope, intercept = np.polyfit(logx, logy, 1)
    pred = slope * logx + intercept
    ss_res = float(np.sum((logy - pred) ** 2))
    ss_tot = float(np.sum((logy - np.mean(logy)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    admissible = (slope > BETA_ADMISSIBLE) or (candidate.z_min > zero_threshold)
    return replace(candidate, beta_hat=float(slope), r2=float(r2),
                   admissible=bool(admissible), degenerate=False)


def analyze_profile(grid: Grid, Z: np.ndarray, zero_threshold: float = 1e-3,
                    half_width: int = DEFAULT_HALF_WIDTH) -> list[NodalCandidate]:
    return [fit_local_exponent(grid, Z, c, zero_threshold)
            for c in find_nodal_candidates(grid, Z, zero_threshold, half_width)]


def classify_trajectory(traj, zero_threshold: float = 1e-3,
                        half_width: int = DEFAULT_HALF_WIDTH) -> dict:
    """Per-snapshot candidate fits; verdict is clean iff no snapshot holds an
    inadmissible candidate with r2 >= 0.98.  Cross-references the Fisher
    functional at the same instants."""
    from .diagnostics import fisher_functional

    delta = traj.config.physical.delta_shift
    snapshots = []
    clean = True
    for state in traj.states:
        z_clip = np.clip(state.Z, 0.0, 1.0)
        fits = analyze_profile(state.grid, z_clip, zero_threshold, half_width)
        flagged = [c for c in fits
                   if (not c.admissible) and (not c.degenerate)
                   and c.r2 >= R2_CONFIDENT]
        clean = clean and not flagged
        snapshots.append({
            "t": state.t,
            "fisher": fisher_functional(state, delta),
            "candidates": [candidate_record(c) for c in fits],
            "n_high_confidence_inadmissible": len(flagged),
        })
    return {"clean": clean, "zero_threshold": zero_threshold,
            "snapshots": snapshots}


def candidate_record(c: NodalCandidate) -> dict:
    return {"y_star": c.y_star, "z_min": c.z_min,
            "beta_hat": None if np.isnan(c.beta_hat) else c.beta_hat,
            "r2": None if np.isnan(c.r2) else c.r2,
            "admissible": c.admissible, "degenerate": c.degenerate}
