"""combust1d: simulator and verification suite for one-dimensional Lagrangian
reacting compressible flow with ignition-threshold Arrhenius kinetics."""

from .config import Config, PhysicalParams, SolverSettings, State
from .errors import (
    BoundViolation,
    Combust1DError,
    ConfigError,
    LinearSolveFailure,
    NoAdmissiblePoint,
    NormalizationError,
    StateInvariantViolation,
)
from .grid import Grid, build_grid
from .reaction import RateSpec, arrhenius_rate, regularized_rate
from .solver import Trajectory, run_simulation, step_imex

__version__ = "1.0.0"

__all__ = [
    "Config", "PhysicalParams", "SolverSettings", "State",
    "Grid", "build_grid",
    "RateSpec", "arrhenius_rate", "regularized_rate",
    "Trajectory", "run_simulation", "step_imex",
    "Combust1DError", "ConfigError", "BoundViolation", "NormalizationError",
    "LinearSolveFailure", "StateInvariantViolation", "NoAdmissiblePoint",
    "__version__",
]
