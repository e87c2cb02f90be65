"""Uniform 1D mesh and second-order discrete calculus.

All unknowns are collocated at the nodes.  Fields are plain numpy arrays of
length ``grid.n_nodes``; the helpers here never mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

UNIT = "unit"
LINE = "line"

MIN_CELLS = 8


@dataclass(frozen=True)
class Grid:
    """Uniform mesh on [0,1] (``unit``) or [-L,L] (``line``)."""

    kind: str
    n_cells: int
    L: float | None = None
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    h: float = field(init=False)

    def __post_init__(self):
        if self.kind == UNIT:
            a, b = 0.0, 1.0
        elif self.kind == LINE:
            if self.L is None or self.L <= 0:
                raise ConfigError("truncated line requires L > 0")
            a, b = -float(self.L), float(self.L)
        else:
            raise ConfigError(f"unknown domain kind {self.kind!r}")
        if self.n_cells < MIN_CELLS:
            raise ConfigError(f"n_cells must be >= {MIN_CELLS}, got {self.n_cells}")
        nodes = np.linspace(a, b, self.n_cells + 1)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "h", (b - a) / self.n_cells)

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    @property
    def length(self) -> float:
        return float(self.nodes[-1] - self.nodes[0])


def build_grid(domain_kind: str, n_cells: int, L: float | None = None) -> Grid:
    """Uniform mesh covering [0,1] or [-L,L], endpoints included."""
    return Grid(kind=domain_kind, n_cells=int(n_cells), L=L)


def check_field(grid: Grid, values) -> np.ndarray:
    """Validate a nodal field: right length, all entries finite."""
    f = np.asarray(values, dtype=float)
    if f.shape != (grid.n_nodes,):
        raise ConfigError(f"field has shape {f.shape}, expected ({grid.n_nodes},)")
    if not np.all(np.isfinite(f)):
        raise ConfigError("field contains NaN or Inf")
    return f


def ddy(grid: Grid, f: np.ndarray) -> np.ndarray:
    """First derivative: central interior, second-order one-sided at the ends.

    Exact for affine fields.
    """
    h = grid.h
    out = np.empty_like(f, dtype=float)
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    return out


def d2dy2(grid: Grid, f: np.ndarray, bc: str = "one-sided") -> np.ndarray:
    """Second derivative via the 3-point stencil.

    ``bc="neumann"`` mirrors ghost values across the boundary, so the discrete
    normal derivative vanishes there; ``bc="one-sided"`` uses the second-order
    one-sided 4-point stencil instead.
    """
    h2 = grid.h * grid.h
    out = np.empty_like(f, dtype=float)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / h2
    if bc == "neumann":
        out[0] = 2.0 * (f[1] - f[0]) / h2
        out[-1] = 2.0 * (f[-2] - f[-1]) / h2
    elif bc == "one-sided":
        out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2
        out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / h2
    else:
        raise ConfigError(f"unknown bc {bc!r}")
    return out


def integrate(grid: Grid, f: np.ndarray) -> float:
    """Composite trapezoid rule; exact for affine fields."""
    return float(np.trapezoid(f, dx=grid.h))


def div_u(grid: Grid, u: np.ndarray) -> np.ndarray:
    """Discrete u_y used for the v-update: central interior, first-order
    one-sided at the boundary nodes.

    With u pinned to zero at both ends, the trapezoid integral of the result
    is exactly zero, so the specific-volume update conserves mass to rounding.
    """
    h = grid.h
    out = np.empty_like(u, dtype=float)
    out[1:-1] = (u[2:] - u[:-2]) / (2.0 * h)
    out[0] = (u[1] - u[0]) / h
    out[-1] = (u[-1] - u[-2]) / h
    return out
