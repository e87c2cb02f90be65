"""Report figures rendered to files alongside the delimited output.

Rendering is headless (Agg) and deterministic: figures are produced from the
same arrays that go into the CSVs, with no timestamps or environment text.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_SERIES = (
    ("mass", "total mass"),
    ("total_energy", "total energy"),
    ("reactant", "reactant mass"),
    ("fisher", "Fisher functional"),
    ("entropy_Z", "entropy of Z"),
    ("lipschitz_v", "Lipschitz norm of v"),
)


def plot_profiles(traj, path: Path) -> Path:
    """Overlaid (v, u, theta, Z) profiles at first, middle, and last snapshot."""
    path = Path(path)
    picks = sorted({0, len(traj.states) // 2, len(traj.states) - 1})
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    for ax, field in zip(axes.flat, ("v", "u", "theta", "Z")):
        for k in picks:
            s = traj.states[k]
            ax.plot(s.grid.nodes, getattr(s, field), label=f"t={s.t:.4g}")
        ax.set_title(field)
        ax.grid(True, alpha=0.3)
    axes[0, 0].legend(fontsize=8)
    for ax in axes[1]:
        ax.set_xlabel("y")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_diagnostics(records, path: Path) -> Path:
    """Time series of the conserved/monitored functionals."""
    path = Path(path)
    times = [r.t for r in records]
    fig, axes = plt.subplots(2, 3, figsize=(12, 6), sharex=True)
    for ax, (name, label) in zip(axes.flat, _SERIES):
        ax.plot(times, [getattr(r, name) for r in records])
        ax.set_title(label)
        ax.grid(True, alpha=0.3)
    for ax in axes[1]:
        ax.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def render_report_figures(traj, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out = [plot_profiles(traj, out_dir / "profiles.png")]
    if traj.records:
        out.append(plot_diagnostics(traj.records, out_dir / "diagnostics.png"))
    return out
