"""Initial-data presets.

On the unit interval the presets keep ``integral(v0) = 1``.  On the truncated
line every field tends to the far-field constants (v, u, theta, Z) ->
(1, 0, 1, 0) near the cut at +/-L.
"""

from __future__ import annotations

import numpy as np

from . import grid as gridmod
from .config import PhysicalParams, State
from .errors import ConfigError
from .grid import Grid

PRESETS = ("stationary", "uniform-reaction", "smooth-bump", "lipschitz-v")


def _bump(y: np.ndarray, center: float, width: float) -> np.ndarray:
    """C^3 compactly supported bump, = ((1 - s^2)_+)^4 with s=(y-c)/w.

    Quartic contact at the support edge keeps Z_y^2/Z locally integrable.
    """
    s = (y - center) / width
    return np.where(np.abs(s) < 1.0, (1.0 - s * s) ** 4, 0.0)


def _defaults(params: dict, **defaults) -> dict:
    unknown = set(params) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown preset parameters: {sorted(unknown)}")
    merged = dict(defaults)
    merged.update(params)
    return merged


def make_preset_initial_data(name: str, params: dict, grid: Grid,
                             phys: PhysicalParams | None = None) -> State:
    """Build the t=0 state for a named preset."""
    y = grid.nodes
    on_line = grid.kind == gridmod.LINE
    ones = np.ones_like(y)
    zeros = np.zeros_like(y)

    if name == "stationary":
        p = _defaults(params, theta_c=2.0)
        theta_c = 1.0 if on_line else p["theta_c"]
        return State(t=0.0, grid=grid, v=ones.copy(), u=zeros.copy(),
                     theta=theta_c * ones, Z=zeros.copy())

    if name == "uniform-reaction":
        if on_line:
            raise ConfigError("uniform-reaction conflicts with the far-field "
                              "data Z -> 0 on the truncated line")
        p = _defaults(params, theta_c=2.0, z_c=1.0)
        if not 0.0 <= p["z_c"] <= 1.0:
            raise ConfigError("preset.z_c must lie in [0,1]")
        return State(t=0.0, grid=grid, v=ones.copy(), u=zeros.copy(),
                     theta=p["theta_c"] * ones, Z=p["z_c"] * ones)

    if name == "smooth-bump":
        if on_line:
            p = _defaults(params, theta_c=2.0, z_max=0.8, center=0.0,
                          width=min(2.0, grid.length / 4.0))
            bump = _bump(y, p["center"], p["width"])
            theta = 1.0 + (p["theta_c"] - 1.0) * bump
        else:
            p = _defaults(params, theta_c=2.0, z_max=0.8, center=0.5, width=0.25)
            bump = _bump(y, p["center"], p["width"])
            theta = p["theta_c"] * ones
        if not 0.0 < p["z_max"] <= 1.0:
            raise ConfigError("preset.z_max must lie in (0,1]")
        if not (y[0] < p["center"] - p["width"] and p["center"] + p["width"] < y[-1]):
            raise ConfigError("bump support must lie strictly inside the domain")
        return State(t=0.0, grid=grid, v=ones.copy(), u=zeros.copy(),
                     theta=theta, Z=p["z_max"] * bump)

    if name == "lipschitz-v":
        # Piecewise-linear tent in v with prescribed |v_y| = slope, shifted so
        # the unit-interval mass normalisation holds exactly.
        if on_line:
            p = _defaults(params, theta_c=1.0, z_c=0.0, slope=2.0, center=0.0,
                          width=min(1.0, grid.length / 8.0))
        else:
            p = _defaults(params, theta_c=2.0, z_c=0.0, slope=2.0, center=0.5,
                          width=0.25)
        slope, c, w = p["slope"], p["center"], p["width"]
        tent = slope * np.maximum(w - np.abs(y - c), 0.0)
        offset = 0.0 if on_line else slope * w * w  # integral of the tent
        v = (1.0 - offset) + tent
        if np.min(v) <= 0:
            raise ConfigError("lipschitz-v preset parameters drive v0 <= 0")
        if not 0.0 <= p["z_c"] <= 1.0:
            raise ConfigError("preset.z_c must lie in [0,1]")
        theta_c = 1.0 if on_line else p["theta_c"]
        z_c = 0.0 if on_line else p["z_c"]
        return State(t=0.0, grid=grid, v=v, u=zeros.copy(),
                     theta=theta_c * ones, Z=z_c * ones)

    raise ConfigError(f"unknown preset {name!r}; known: {PRESETS}")
