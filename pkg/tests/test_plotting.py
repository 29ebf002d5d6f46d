"""PNG rendering of trajectory slow components."""

from __future__ import annotations

import numpy as np

from gridscatter import TrajectoryPoint, get_system, integrate, write_trajectory_csv
from gridscatter.plotting import render_trajectory

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def test_render_from_trajectory(tmp_path):
    system = get_system("test1")
    start = TrajectoryPoint.make(0.0, np.array([-1.0, 1.0]), 0.0)
    traj = integrate(system, "euler", start, 0.001, 0.2)
    png = tmp_path / "plot.png"
    out = render_trajectory(traj, png, title="smoke")
    assert out == png
    assert png.read_bytes()[:8] == PNG_MAGIC


def test_render_from_csv_path(tmp_path):
    """A CSV path is accepted directly; the figure comes from the parsed file."""
    system = get_system("test1")
    start = TrajectoryPoint.make(0.0, np.array([-1.0, 1.0]), 0.0)
    traj = integrate(system, "euler", start, 0.001, 0.2)
    csv = tmp_path / "traj.csv"
    write_trajectory_csv(traj, csv)
    png = tmp_path / "from_csv.png"
    render_trajectory(csv, png)
    assert png.read_bytes()[:8] == PNG_MAGIC
