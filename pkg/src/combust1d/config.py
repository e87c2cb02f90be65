"""Model constants, solver settings, run configuration, and validation.

Config files are flat UTF-8 ``key=value`` text with namespaced keys
(``physical.a``, ``grid.n_cells``, ``preset.name``, ``solver.dt``,
``output.dir``, ``output.every_n_steps``, ``rng.seed``).  Unknown keys are
errors.  Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import grid as gridmod
from .errors import BoundViolation, ConfigError, NormalizationError
from .grid import Grid, build_grid, ddy, integrate
from .reaction import RateSpec


@dataclass(frozen=True)
class PhysicalParams:
    a: float = 1.0            # gas constant product R*M
    q: float = 1.0            # heat release
    mu: float = 1.0           # bulk viscosity
    nu: float = 1.0           # heat conduction
    D: float = 1.0            # species diffusion
    K: float = 1.0            # reaction rate constant
    A: float = 1.0            # activation energy
    alpha_exp: float = 1.0    # Arrhenius temperature exponent
    theta_ignite: float = 1.0
    eps_reg: float = 0.1
    delta_shift: float = 1e-4

    def __post_init__(self):
        positive = ("a", "q", "mu", "nu", "D", "K", "A", "theta_ignite", "eps_reg")
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigError(f"physical.{name} must be > 0")
        if self.alpha_exp < 0:
            raise ConfigError("physical.alpha_exp must be >= 0")
        if not 0 <= self.delta_shift < 1e-2:
            raise ConfigError("physical.delta_shift must lie in [0, 1e-2)")
        if self.eps_reg >= self.theta_ignite:
            raise ConfigError("physical.eps_reg must be < physical.theta_ignite")

    @property
    def rate_spec(self) -> RateSpec:
        return RateSpec(alpha_exp=self.alpha_exp, A=self.A,
                        theta_ignite=self.theta_ignite, eps_reg=self.eps_reg)


@dataclass(frozen=True)
class SolverSettings:
    dt: float = 1e-3
    t_end: float = 1.0
    cfl_safety: float = 0.9
    max_iters: int = 50      # cap for the linear/Picard machinery
    linear_tol: float = 1e-12

    def __post_init__(self):
        if self.dt <= 0 or self.t_end <= 0:
            raise ConfigError("solver.dt and solver.t_end must be > 0")
        if not 0 < self.cfl_safety <= 1:
            raise ConfigError("solver.cfl_safety must lie in (0, 1]")


@dataclass(frozen=True)
class State:
    """The quadruple (v, u, theta, Z) at one time instant."""

    t: float
    grid: Grid
    v: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    Z: np.ndarray

    Z_TOL = 1e-12

    def check(self) -> "State":
        for name in ("v", "u", "theta", "Z"):
            gridmod.check_field(self.grid, getattr(self, name))
        if np.min(self.v) <= 0:
            raise BoundViolation(f"v must be > 0 everywhere (min {np.min(self.v):g})")
        if np.min(self.theta) <= 0:
            raise BoundViolation(f"theta must be > 0 everywhere (min {np.min(self.theta):g})")
        if np.min(self.Z) < -self.Z_TOL or np.max(self.Z) > 1 + self.Z_TOL:
            raise BoundViolation(
                f"Z must lie in [0,1] up to {self.Z_TOL:g} "
                f"(range [{np.min(self.Z):g}, {np.max(self.Z):g}])")
        return self


@dataclass(frozen=True)
class Config:
    physical: PhysicalParams = field(default_factory=PhysicalParams)
    domain: str = gridmod.UNIT
    L: float = 8.0
    n_cells: int = 200
    preset: str = "stationary"
    preset_params: dict = field(default_factory=dict)
    solver: SolverSettings = field(default_factory=SolverSettings)
    out_dir: str = "out"
    every_n_steps: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.every_n_steps < 1:
            raise ConfigError("output.every_n_steps must be >= 1")

    def make_grid(self) -> Grid:
        return build_grid(self.domain, self.n_cells,
                          self.L if self.domain == gridmod.LINE else None)


# ---------------------------------------------------------------------------
# key=value file format

_PRESET_PARAM_KEYS = {"theta_c", "z_c", "z_max", "center", "width", "slope"}

_SCHEMA = {
    "physical.a": float, "physical.q": float, "physical.mu": float,
    "physical.nu": float, "physical.D": float, "physical.K": float,
    "physical.A": float, "physical.alpha_exp": float,
    "physical.theta_ignite": float, "physical.eps_reg": float,
    "physical.delta_shift": float,
    "grid.domain": str, "grid.L": float, "grid.n_cells": int,
    "preset.name": str,
    "solver.dt": float, "solver.t_end": float, "solver.cfl_safety": float,
    "solver.max_iters": int, "solver.linear_tol": float,
    "output.dir": str, "output.every_n_steps": int,
    "rng.seed": int,
}
_SCHEMA.update({f"preset.{k}": float for k in _PRESET_PARAM_KEYS})


def parse_kv_text(text: str) -> dict:
    """Parse key=value lines into a typed, schema-checked dict."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            out[key] = _SCHEMA[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return out


def config_from_kv(kv: dict) -> Config:
    """Build a Config from a parsed key=value mapping."""
    for key in kv:
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r}")
        if not isinstance(kv[key], _SCHEMA[key]):
            kv = dict(kv)
            kv[key] = _SCHEMA[key](kv[key])
    phys_kwargs = {k.split(".", 1)[1]: v for k, v in kv.items() if k.startswith("physical.")}
    solver_kwargs = {k.split(".", 1)[1]: v for k, v in kv.items() if k.startswith("solver.")}
    preset_params = {k.split(".", 1)[1]: v for k, v in kv.items()
                     if k.startswith("preset.") and k != "preset.name"}
    return Config(
        physical=PhysicalParams(**phys_kwargs),
        domain=kv.get("grid.domain", gridmod.UNIT),
        L=kv.get("grid.L", 8.0),
        n_cells=kv.get("grid.n_cells", 200),
        preset=kv.get("preset.name", "stationary"),
        preset_params=preset_params,
        solver=SolverSettings(**solver_kwargs),
        out_dir=kv.get("output.dir", "out"),
        every_n_steps=kv.get("output.every_n_steps", 10),
        seed=kv.get("rng.seed", 0),
    )


def load_config(path, overrides: dict | None = None) -> Config:
    """Read a key=value config file, applying optional override pairs."""
    with open(path, encoding="utf-8") as fh:
        kv = parse_kv_text(fh.read())
    if overrides:
        for key, value in overrides.items():
            if key not in _SCHEMA:
                raise ConfigError(f"unknown override key {key!r}")
            kv[key] = _SCHEMA[key](value)
    return config_from_kv(kv)


def config_to_kv(cfg: Config) -> dict:
    """Flatten a Config back to the key=value mapping (for index files)."""
    kv = {f"physical.{k}": getattr(cfg.physical, k)
          for k in ("a", "q", "mu", "nu", "D", "K", "A", "alpha_exp",
                    "theta_ignite", "eps_reg", "delta_shift")}
    kv["grid.domain"] = cfg.domain
    if cfg.domain == gridmod.LINE:
        kv["grid.L"] = cfg.L
    kv["grid.n_cells"] = cfg.n_cells
    kv["preset.name"] = cfg.preset
    kv.update({f"preset.{k}": v for k, v in sorted(cfg.preset_params.items())})
    kv.update({"solver.dt": cfg.solver.dt, "solver.t_end": cfg.solver.t_end,
               "solver.cfl_safety": cfg.solver.cfl_safety,
               "solver.max_iters": cfg.solver.max_iters,
               "solver.linear_tol": cfg.solver.linear_tol})
    kv.update({"output.dir": cfg.out_dir, "output.every_n_steps": cfg.every_n_steps,
               "rng.seed": cfg.seed})
    return kv


# ---------------------------------------------------------------------------
# validation of initial data

COMPAT_WARN_TOL = 1e-6
MASS_NORMALIZATION_TOL = 1e-8


def validate_config(cfg: Config):
    """Validate a Config against the initial-data constraints.

    Returns ``(state0, warnings)`` where ``state0`` is the preset initial
    state and ``warnings`` is a list of human-readable compatibility warnings.
    Hard bound violations raise; compatibility residuals above the tolerance
    only warn, because the fourth compatibility expression cannot vanish for
    strictly positive temperature data.
    """
    from .presets import make_preset_initial_data

    g = cfg.make_grid()
    state = make_preset_initial_data(cfg.preset, cfg.preset_params, g, cfg.physical)
    state.check()

    if cfg.domain == gridmod.UNIT:
        mass = integrate(g, state.v)
        if abs(mass - 1.0) > MASS_NORMALIZATION_TOL:
            raise NormalizationError(
                f"integral of v0 over [0,1] must be 1, got {mass!r}")

    warnings = []
    p = cfg.physical
    dtheta = ddy(g, state.theta)
    dZ = ddy(g, state.Z)
    visc_term = ddy(g, p.mu * ddy(g, state.u) / state.v)
    fourth = p.a * state.theta / state.v - visc_term
    for label, values in (("u0", state.u), ("(theta0)_y", dtheta), ("(Z0)_y", dZ),
                          ("a*theta0/v0 - (mu*u0_y/v0)_y", fourth)):
        for end, idx in (("left", 0), ("right", -1)):
            residual = abs(float(values[idx]))
            if residual > COMPAT_WARN_TOL:
                warnings.append(
                    f"compatibility residual {label} at {end} boundary: {residual:.3e}")
    return state, warnings


def with_overrides(cfg: Config, overrides: dict) -> Config:
    """Return a new Config with string key=value overrides applied."""
    kv = config_to_kv(cfg)
    for key, value in overrides.items():
        if key not in _SCHEMA:
            raise ConfigError(f"unknown override key {key!r}")
        kv[key] = _SCHEMA[key](value)
    return config_from_kv(kv)


def schema_keys():
    return sorted(_SCHEMA)


__all__ = [
    "PhysicalParams", "SolverSettings", "State", "Config",
    "parse_kv_text", "config_from_kv", "config_to_kv", "load_config",
    "validate_config", "with_overrides", "replace", "schema_keys",
]
