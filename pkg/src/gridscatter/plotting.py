"""Render trajectory CSVs to PNG line plots (headless Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .trajectory import Trajectory, read_csv

__all__ = ["render_trajectory"]


def render_trajectory(
    source: Trajectory | str | Path,
    png_path: str | Path,
    component: int = 1,
    title: str = "",
) -> Path:
    """Plot one slow component against time and save a PNG.

    `source` is a Trajectory or a path to a trajectory CSV; component 1 is
    the kicked variable in all built-in systems.
    """
    traj = source if isinstance(source, Trajectory) else read_csv(source)
    png_path = Path(png_path)
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    ax.plot(traj.t, traj.component(component), lw=0.6, color="tab:blue")
    ax.set_xlabel("t")
    ax.set_ylabel(f"I{component + 1}")
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return png_path
