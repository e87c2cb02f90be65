"""Functionals, identities, and residuals evaluated on states and trajectories.

Trajectory-level time integrals use the trapezoid rule on the snapshot
cadence, so the cadence is an accuracy parameter.  All functions are pure;
records for a whole trajectory can be computed from stored snapshots alone.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from . import grid as gridmod
from .config import PhysicalParams, State
from .errors import ConfigError, NoAdmissiblePoint
from .grid import Grid, d2dy2, ddy, integrate
from .reaction import arrhenius_rate, regularized_rate

Z_FLOOR = 1e-30
V_FLOOR_DEFAULT = 1e-3
THETA_FLOOR_DEFAULT = 1e-3


@dataclass(frozen=True)
class DiagnosticsRecord:
    """All monitored functionals at one instant.

    ``kazhikhov_residual`` is only meaningful on the unit interval and
    ``boundary_leakage`` only on the truncated line; the inapplicable entry
    is reported as 0.0.
    """

    t: float
    mass: float
    reactant: float
    total_energy: float
    entropy_identity_residual: float
    reactant_balance_residual: float
    fisher: float
    dissipation: float
    entropy_Z: float
    lipschitz_v: float
    min_v: float
    max_v: float
    min_theta: float
    max_theta: float
    min_Z: float
    max_Z: float
    kazhikhov_residual: float
    boundary_leakage: float

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


# ---------------------------------------------------------------------------
# single-state functionals

def mass_integral(state: State) -> float:
    return integrate(state.grid, state.v)


def reactant_integral(state: State) -> float:
    return integrate(state.grid, state.Z)


def total_energy(state: State, params: PhysicalParams) -> float:
    return integrate(state.grid,
                     state.theta + 0.5 * state.u**2 + params.q * state.Z)


def fisher_functional(state: State, delta: float) -> float:
    """integral of Z_y^2 / (Z + delta); delta=0 clamps Z away from 0/0."""
    if delta < 0:
        raise ConfigError("delta must be >= 0")
    zy = ddy(state.grid, state.Z)
    denom = state.Z + delta if delta > 0 else np.maximum(state.Z, Z_FLOOR)
    return integrate(state.grid, zy * zy / denom)


def dissipation_functional(state: State, params: PhysicalParams,
                           delta: float) -> float:
    """G = integral of (D/v^2) * X * ((log X)_yy)^2 with X = Z + delta."""
    if delta <= 0:
        raise ConfigError("delta must be > 0")
    X = state.Z + delta
    curv = d2dy2(state.grid, np.log(X), bc="neumann")
    return integrate(state.grid, params.D / state.v**2 * X * curv * curv)


def entropy_Z(state_or_grid, Z: np.ndarray | None = None) -> float:
    """Ent(Z) w.r.t. Lebesgue measure; 0 log 0 = 0 by convention."""
    if Z is None:
        g, Z = state_or_grid.grid, state_or_grid.Z
    else:
        g = state_or_grid
    zlogz = np.where(Z > 0, Z * np.log(np.where(Z > 0, Z, 1.0)), 0.0)
    total = integrate(g, Z)
    mean_term = total * np.log(total) if total > 0 else 0.0
    return integrate(g, zlogz) - mean_term


def entropy_Z_gaussian(g: Grid, Z: np.ndarray) -> float:
    """Entropy of Z against the standard Gaussian weight on the line."""
    w = np.exp(-0.5 * g.nodes**2) / np.sqrt(2.0 * np.pi)
    zlogz = np.where(Z > 0, Z * np.log(np.where(Z > 0, Z, 1.0)), 0.0)
    total = integrate(g, w * Z)
    mean_term = total * np.log(total) if total > 0 else 0.0
    return integrate(g, w * zlogz) - mean_term


def lipschitz_norm_v(state: State) -> float:
    return float(np.max(np.abs(ddy(state.grid, state.v))))


def bounds_report(state: State, v_floor: float = V_FLOOR_DEFAULT,
                  theta_floor: float = THETA_FLOOR_DEFAULT) -> dict:
    report = {
        "min_v": float(np.min(state.v)), "max_v": float(np.max(state.v)),
        "min_theta": float(np.min(state.theta)),
        "max_theta": float(np.max(state.theta)),
        "min_Z": float(np.min(state.Z)), "max_Z": float(np.max(state.Z)),
    }
    report["pass"] = bool(
        report["min_v"] >= v_floor
        and report["min_theta"] >= theta_floor
        and report["min_Z"] >= -State.Z_TOL
        and report["max_Z"] <= 1.0 + State.Z_TOL)
    return report


def boundary_leakage(state: State) -> float:
    """Max deviation of the end values from the far-field (1, 0, 1, 0)."""
    return float(max(
        max(abs(state.v[0] - 1.0), abs(state.v[-1] - 1.0)),
        max(abs(state.u[0]), abs(state.u[-1])),
        max(abs(state.theta[0] - 1.0), abs(state.theta[-1] - 1.0)),
        max(abs(state.Z[0]), abs(state.Z[-1])),
    ))


def transcendental_roots(E1: float, tol: float = 1e-10) -> tuple[float, float]:
    """The two roots 0 < alpha0 <= 1 <= beta0 of y - 1 - log(y) = E1."""
    if E1 < 0:
        raise ConfigError("E1 must be >= 0")
    if E1 == 0:
        return 1.0, 1.0

    def f(y):
        return y - 1.0 - np.log(y)

    # lower root in (0, 1]: f decreasing there
    lo, hi = 1e-300, 1.0
    while f(lo) < E1:
        lo *= 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > E1:
            lo = mid
        else:
            hi = mid
    alpha0 = 0.5 * (lo + hi)

    # upper root in [1, inf): f increasing there
    lo, hi = 1.0, 2.0
    while f(hi) < E1:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < E1:
            lo = mid
        else:
            hi = mid
    beta0 = 0.5 * (lo + hi)
    return float(alpha0), float(beta0)


# ---------------------------------------------------------------------------
# trajectory-level residuals

def _entropy_density(state: State, params: PhysicalParams) -> float:
    a = params.a
    return integrate(state.grid,
                     a * (state.v - 1.0 - np.log(state.v))
                     + 0.5 * state.u**2
                     + (state.theta - 1.0 - np.log(state.theta)))


def initial_entropy_energy(state0: State, params: PhysicalParams) -> float:
    """The conserved entropy-energy value evaluated on the initial data."""
    return _entropy_density(state0, params)


def _cumtrapz(times: np.ndarray, series: np.ndarray) -> np.ndarray:
    """Cumulative trapezoid along the first axis."""
    out = np.zeros_like(series)
    dt = np.diff(times)
    if series.ndim == 1:
        out[1:] = np.cumsum(0.5 * dt * (series[1:] + series[:-1]))
    else:
        steps = 0.5 * dt[:, None] * (series[1:] + series[:-1])
        out[1:] = np.cumsum(steps, axis=0)
    return out


def reactant_balance_series(states: list[State], params: PhysicalParams) -> np.ndarray:
    """|int Z(t) + int_0^t int K Phi_eps(theta) Z - int Z_0| per snapshot."""
    times = np.array([s.t for s in states])
    zint = np.array([reactant_integral(s) for s in states])
    sink = np.array([
        integrate(s.grid, params.K * regularized_rate(s.theta, params.rate_spec) * s.Z)
        for s in states])
    return np.abs(zint + _cumtrapz(times, sink) - zint[0])


def reactant_balance_residual(traj, params: PhysicalParams | None = None) -> float:
    params = params or traj.config.physical
    if len(traj.states) < 2:
        raise ConfigError("need at least 2 snapshots")
    return float(np.max(reactant_balance_series(traj.states, params)))


def entropy_identity_series(states: list[State], params: PhysicalParams) -> np.ndarray:
    times = np.array([s.t for s in states])
    energy = np.array([_entropy_density(s, params) for s in states])
    diss = []
    for s in states:
        uy = ddy(s.grid, s.u)
        thy = ddy(s.grid, s.theta)
        rate = regularized_rate(s.theta, params.rate_spec)
        integrand = (params.mu * uy**2 / (s.v * s.theta)
                     + params.nu * thy**2 / (s.v * s.theta**2)
                     - params.q * (s.theta - 1.0) / s.theta * params.K * rate * s.Z)
        diss.append(integrate(s.grid, integrand))
    return np.abs(energy + _cumtrapz(times, np.array(diss)) - energy[0])


def entropy_identity_residual(traj, params: PhysicalParams | None = None
                              ) -> tuple[float, float]:
    """Max residual of the entropy identity over the run, plus E0."""
    params = params or traj.config.physical
    if len(traj.states) < 2:
        raise ConfigError("need at least 2 snapshots")
    e0 = initial_entropy_energy(traj.states[0], params)
    return float(np.max(entropy_identity_series(traj.states, params))), e0


# ---------------------------------------------------------------------------
# Kazhikhov representation residual

def admissible_window(state0: State, params: PhysicalParams) -> tuple[float, float]:
    """[alpha0, beta0] derived from the initial entropy-energy level."""
    e0 = initial_entropy_energy(state0, params)
    e1 = (e0 + params.q * reactant_integral(state0)) / min(1.0, params.a)
    return transcendental_roots(e1)


def _select_ystar(state: State, alpha0: float, beta0: float,
                  slack: float = 1e-9) -> int:
    ok = ((state.v >= alpha0 - slack) & (state.v <= beta0 + slack)
          & (state.theta >= alpha0 - slack) & (state.theta <= beta0 + slack))
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        raise NoAdmissiblePoint(
            f"no node with v, theta in [{alpha0:g}, {beta0:g}] at t={state.t:g}")
    return int(idx[0])


def kazhikhov_residual_series(states: list[State], params: PhysicalParams
                              ) -> np.ndarray:
    """Max-over-y residual of the integral representation of v, per snapshot.

    The base point y*(t) is the smallest admissible node index per snapshot;
    the representation holds for any base point, so the choice only matters
    for determinism.
    """
    g = states[0].grid
    if g.kind != gridmod.UNIT:
        raise ConfigError("the representation residual is defined on [0,1]")
    alpha0, beta0 = admissible_window(states[0], params)
    a_over_mu = params.a / params.mu
    times = np.array([s.t for s in states])
    v0 = states[0].v
    u0 = states[0].u
    h = g.h

    # cumulative time integral of theta/v at every node
    theta_over_v = np.array([s.theta / s.v for s in states])
    C = _cumtrapz(times, theta_over_v)

    A = np.empty(len(states))
    B = np.empty((len(states), g.n_nodes))
    for j, s in enumerate(states):
        ystar = _select_ystar(s, alpha0, beta0)
        A[j] = v0[ystar] * np.exp(a_over_mu * C[j, ystar])
        # spatial integral of (u0 - u) from y* to y, trapezoid
        du = u0 - s.u
        prim = np.concatenate(([0.0], np.cumsum(0.5 * h * (du[1:] + du[:-1]))))
        B[j] = np.exp((prim - prim[ystar]) / params.mu) / (v0 * s.v[ystar])

    G = np.array([s.theta for s in states]) * A[:, None] * B
    rhs = 1.0 + a_over_mu * _cumtrapz(times, G)
    lhs = A[:, None] * np.array([s.v for s in states]) * B
    return np.max(np.abs(lhs - rhs), axis=1)


def kazhikhov_residual(traj, params: PhysicalParams | None = None) -> float:
    params = params or traj.config.physical
    return float(np.max(kazhikhov_residual_series(traj.states, params)))


# ---------------------------------------------------------------------------
# Gronwall-style Fisher monitor

def gronwall_monitor(traj, params: PhysicalParams | None = None,
                     delta: float | None = None) -> dict:
    """Fisher functional F(t), dissipation G(t), and S = (dF/dt + G)/(1 + F).

    ``max_S`` is the quantity expected to stay stable (within a factor of 2)
    under one mesh refinement.
    """
    params = params or traj.config.physical
    if delta is None:
        delta = params.delta_shift
    if delta <= 0:
        raise ConfigError("gronwall_monitor needs delta > 0")
    states = traj.states
    if len(states) < 3:
        raise ConfigError("need at least 3 snapshots")
    times = np.array([s.t for s in states])
    F = np.array([fisher_functional(s, delta) for s in states])
    G = np.array([dissipation_functional(s, params, delta) for s in states])
    dFdt = np.gradient(F, times)
    S = (dFdt + G) / (1.0 + F)
    return {
        "times": times, "fisher": F, "dissipation": G, "S": S,
        "max_fisher": float(np.max(F)), "max_S": float(np.max(S)),
    }


# ---------------------------------------------------------------------------
# asymptotic states

@dataclass(frozen=True)
class AsymptoticStates:
    theta_inf: float
    Z_inf: float


def asymptotic_state_check(traj, params: PhysicalParams | None = None,
                           tol: float = 1e-2) -> dict:
    """Terminal spatial means against the conserved-energy prediction."""
    params = params or traj.config.physical
    states = traj.states
    g = states[0].grid
    length = g.length
    terminal = states[-1]
    theta_bar = integrate(g, terminal.theta) / length
    z_bar = integrate(g, terminal.Z) / length
    energy0 = total_energy(states[0], params) / length
    phi_bar = float(arrhenius_rate(theta_bar, params.rate_spec))

    tail_start = max(1, int(0.9 * len(states)))
    trend = [float(np.max(np.abs(s.theta - theta_bar))) for s in states[tail_start:]]
    return {
        "asymptotic": AsymptoticStates(theta_inf=float(theta_bar), Z_inf=float(z_bar)),
        "energy_residual": float(abs(theta_bar + params.q * z_bar - energy0)),
        "rate_product": float(phi_bar * z_bar),
        "energy_ok": bool(abs(theta_bar + params.q * z_bar - energy0) <= tol),
        "theta_deviation_trend": trend,
    }


# ---------------------------------------------------------------------------
# record assembly

def trajectory_records(traj, delta: float | None = None) -> list[DiagnosticsRecord]:
    """Evaluate the full DiagnosticsRecord at every snapshot of a trajectory."""
    params = traj.config.physical
    if delta is None:
        delta = params.delta_shift if params.delta_shift > 0 else 1e-4
    states = traj.states
    if not states:
        return []
    g = states[0].grid
    on_unit = g.kind == gridmod.UNIT

    balance = reactant_balance_series(states, params)
    identity = entropy_identity_series(states, params)
    if on_unit:
        try:
            kaz = kazhikhov_residual_series(states, params)
        except NoAdmissiblePoint:
            kaz = np.full(len(states), np.inf)
    else:
        kaz = np.zeros(len(states))

    records = []
    for j, s in enumerate(states):
        b = bounds_report(s)
        records.append(DiagnosticsRecord(
            t=float(s.t),
            mass=mass_integral(s),
            reactant=reactant_integral(s),
            total_energy=total_energy(s, params),
            entropy_identity_residual=float(identity[j]),
            reactant_balance_residual=float(balance[j]),
            fisher=fisher_functional(s, delta),
            dissipation=dissipation_functional(s, params, delta),
            entropy_Z=entropy_Z(s),
            lipschitz_v=lipschitz_norm_v(s),
            min_v=b["min_v"], max_v=b["max_v"],
            min_theta=b["min_theta"], max_theta=b["max_theta"],
            min_Z=b["min_Z"], max_Z=b["max_Z"],
            kazhikhov_residual=float(kaz[j]),
            boundary_leakage=0.0 if on_unit else boundary_leakage(s),
        ))
    return records
