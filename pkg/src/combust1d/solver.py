"""IMEX time integration of the Lagrangian reacting-flow system.

One step advances (v, u, theta, Z):

* u: implicit viscous term (mu u_y / v)_y, explicit pressure gradient
  (a theta / v)_y; Dirichlet u = 0 at both ends.
* v: explicit exact discrete antiderivative of u_y (conserves mass to
  rounding with the pinned velocity).
* Z: implicit diffusion (D/v^2 Z_y)_y plus implicit reaction decay, which
  keeps Z in [0, max Z^n] unconditionally (M-matrix).
* theta: internal-energy form, implicit conduction (nu theta_y / v)_y,
  explicit compression work and viscous heating, reaction heating matched to
  the discrete Z decay so the reaction exchanges energy exactly.

Nonlinear coefficients (1/v, 1/v^2) are frozen at time level n within a step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .config import Config, PhysicalParams, SolverSettings, State, validate_config
from .errors import LinearSolveFailure, StateInvariantViolation
from .grid import Grid, ddy, div_u
from .reaction import regularized_rate


@dataclass
class Trajectory:
    """Snapshot sequence produced by :func:`run_simulation`."""

    config: Config
    states: list = field(default_factory=list)
    records: list = field(default_factory=list)
    aborted: bool = False
    error: str | None = None

    @property
    def terminal(self) -> State:
        return self.states[-1]

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])


def _banded_diffusion(grid: Grid, kappa_face: np.ndarray, diag0: np.ndarray,
                      dt: float) -> np.ndarray:
    """Banded form of diag0*I - dt*L, L the zero-flux diffusion operator.

    ``kappa_face`` holds the face coefficients (length n_cells).  The boundary
    rows mirror a ghost node, so the discrete normal flux vanishes and the row
    sums equal diag0 (M-matrix; trapezoid integral of L is exactly zero).
    """
    n = grid.n_nodes
    r = dt / grid.h**2
    ab = np.zeros((3, n))
    # interior rows
    ab[1, 1:-1] = diag0[1:-1] + r * (kappa_face[1:] + kappa_face[:-1])
    ab[0, 2:] = -r * kappa_face[1:]     # superdiagonal entries for rows 1..n-2
    ab[2, :-2] = -r * kappa_face[:-1]   # subdiagonal entries for rows 1..n-2
    # Neumann rows: half control volume at the ends
    ab[1, 0] = diag0[0] + 2.0 * r * kappa_face[0]
    ab[0, 1] = -2.0 * r * kappa_face[0]
    ab[1, -1] = diag0[-1] + 2.0 * r * kappa_face[-1]
    ab[2, -2] = -2.0 * r * kappa_face[-1]
    return ab


def _solve(ab: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        return solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - scipy raises ValueError too
        raise LinearSolveFailure(str(exc)) from exc
    except ValueError as exc:
        raise LinearSolveFailure(str(exc)) from exc


def apply_diffusion(grid: Grid, kappa_face: np.ndarray, f: np.ndarray) -> np.ndarray:
    """The discrete zero-flux diffusion operator L f (for diagnostics/tests)."""
    h2 = grid.h**2
    flux = kappa_face * np.diff(f) / h2
    out = np.empty_like(f)
    out[1:-1] = flux[1:] - flux[:-1]
    out[0] = 2.0 * flux[0]
    out[-1] = -2.0 * flux[-1]
    return out


def adapt_dt(state: State, settings: SolverSettings, params: PhysicalParams) -> float:
    """Deterministic step-size restriction for the explicit pressure coupling."""
    wave = float(np.max(np.abs(state.u)) + np.sqrt(params.a * np.max(state.theta)))
    return min(settings.dt, settings.cfl_safety * state.grid.h / wave)


def step_imex(state: State, params: PhysicalParams, settings: SolverSettings,
              dt: float | None = None) -> State:
    """Advance the state by one IMEX step of size ``dt`` (default settings.dt)."""
    if dt is None:
        dt = settings.dt
    g = state.grid
    v, u, theta, Z = state.v, state.u, state.theta, state.Z
    v_face = 0.5 * (v[1:] + v[:-1])

    # --- velocity: implicit viscosity, explicit pressure gradient ----------
    ab = _banded_diffusion(g, params.mu / v_face, np.ones(g.n_nodes), dt)
    rhs = u - dt * ddy(g, params.a * theta / v)
    # Dirichlet rows u = 0 at both ends
    ab[1, 0] = 1.0
    ab[0, 1] = 0.0
    ab[1, -1] = 1.0
    ab[2, -2] = 0.0
    rhs[0] = 0.0
    rhs[-1] = 0.0
    u_new = _solve(ab, rhs)

    # --- specific volume: exact discrete antiderivative of u_y -------------
    dudy = div_u(g, u_new)
    v_new = v + dt * dudy

    # --- reactant: implicit diffusion + implicit decay ----------------------
    rate = regularized_rate(theta, params.rate_spec)
    decay = 1.0 + dt * params.K * rate
    ab = _banded_diffusion(g, params.D / v_face**2, decay, dt)
    Z_new = _solve(ab, Z)

    # --- temperature: internal-energy form ----------------------------------
    # Reaction heating uses the implicit Z so the discrete reaction exchanges
    # theta- and Z-energy exactly.
    source = (-params.a * theta / v * dudy
              + params.mu * dudy**2 / v
              + params.q * params.K * rate * Z_new)
    ab = _banded_diffusion(g, params.nu / v_face, np.ones(g.n_nodes), dt)
    theta_new = _solve(ab, theta + dt * source)

    if np.min(v_new) <= 0 or np.min(theta_new) <= 0:
        raise StateInvariantViolation(
            f"positivity lost at t={state.t + dt:g}: "
            f"min v={np.min(v_new):g}, min theta={np.min(theta_new):g}")
    if not (np.all(np.isfinite(v_new)) and np.all(np.isfinite(u_new))
            and np.all(np.isfinite(theta_new)) and np.all(np.isfinite(Z_new))):
        raise StateInvariantViolation(f"non-finite values at t={state.t + dt:g}")

    return State(t=state.t + dt, grid=g, v=v_new, u=u_new,
                 theta=theta_new, Z=Z_new)


def run_simulation(config: Config, with_records: bool = True) -> Trajectory:
    """Step from t=0 to t_end, snapshotting at the output cadence.

    On an invariant violation the partial trajectory is returned with
    ``aborted`` set; everything accumulated so far stays usable.
    """
    from .diagnostics import trajectory_records

    state, _ = validate_config(config)
    params, settings = config.physical, config.solver
    traj = Trajectory(config=config, states=[state])

    t_end = settings.t_end
    step = 0
    try:
        while state.t < t_end - 1e-12 * t_end:
            dt = adapt_dt(state, settings, params)
            dt = min(dt, t_end - state.t)
            state = step_imex(state, params, settings, dt=dt)
            step += 1
            if step % config.every_n_steps == 0 or state.t >= t_end - 1e-12 * t_end:
                traj.states.append(state)
    except (StateInvariantViolation, LinearSolveFailure) as exc:
        traj.aborted = True
        traj.error = f"{type(exc).__name__}: {exc}"

    if with_records:
        traj.records = trajectory_records(traj)
    return traj
