"""Experiment pipelines: config handling, run artifacts, jump table, figures.

Oracles: kappa strings resolve by arithmetic, manifests echo the resolved
parameters, every emitted trajectory CSV parses back into a validating
Trajectory, and the jump-table CSV carries residuals below the published
measurement tolerance.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from gridscatter import (
    FIGURES,
    ExperimentConfig,
    default_stride,
    figure_data,
    parse_config_file,
    read_trajectory_csv,
    resolve_kappa,
    run_experiment,
)

EPS = 0.001


# ---------------------------------------------------------------------------
# configuration


def test_resolve_kappa():
    """'eps', 'eps/N', decimal strings, and plain numbers all resolve."""
    assert resolve_kappa("eps", EPS) == EPS
    assert resolve_kappa("eps/10", EPS) == EPS / 10.0
    assert resolve_kappa("0.0005", EPS) == 0.0005
    assert resolve_kappa(2e-4, EPS) == 2e-4
    with pytest.raises(ValueError):
        resolve_kappa("eps/0", EPS)
    with pytest.raises(ValueError):
        resolve_kappa("-0.001", EPS)
    with pytest.raises(ValueError):
        resolve_kappa("fine", EPS)


def test_default_stride_caps_rows():
    """Auto stride keeps recorded rows at or under the 200k cap."""
    assert default_stride(1) == 1
    assert default_stride(200_000) == 1
    assert default_stride(200_001) == 2
    assert default_stride(14_000_000) == 70
    assert math.ceil(14_000_000 / 70) <= 200_000


def test_parse_config_file(tmp_path):
    """Flat key=value files with comments coerce to the field types."""
    path = tmp_path / "run.cfg"
    path.write_text(
        "# a comment line\n"
        "system = test11\n"
        "kappa = eps/2\n"
        "t_end = 3.5\n"
        "stride = 4\n"
        "initial_I = -1, 1\n"
        "\n"
    )
    cfg = parse_config_file(path)
    assert cfg["system"] == "test11"
    assert cfg["kappa"] == "eps/2"
    assert cfg["t_end"] == 3.5
    assert cfg["stride"] == 4
    assert cfg["initial_I"] == (-1.0, 1.0)
    config = ExperimentConfig(**cfg)
    assert config.t_end == 3.5


def test_parse_config_file_rejects_unknown_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("t_end = 3.5\nstep_size = 0.001\n")
    with pytest.raises(ValueError, match=r":2: unknown key"):
        parse_config_file(path)


def test_config_defaults():
    config = ExperimentConfig()
    assert config.system == "test1"
    assert config.stepper == "euler"
    assert config.kappa == "eps"
    assert config.t_end == 14.0
    assert config.initial_I == (-1.0, 1.0)


# ---------------------------------------------------------------------------
# single runs


def test_run_experiment_artifacts(tmp_path):
    """A run writes a CSV that parses back bitwise plus a manifest echoing
    every resolved parameter."""
    config = ExperimentConfig(system="test1", kappa="eps/2", t_end=1.0)
    traj, art = run_experiment(config, tmp_path)
    assert art["kappa"] == EPS / 2.0
    assert art["steps"] == 2000
    assert art["rows"] == len(traj)

    back = read_trajectory_csv(art["trajectory_csv"], kappa=art["kappa"], stride=art["stride"])
    back.validate()
    assert np.array_equal(back.I, traj.I)

    manifest = dict(
        line.split("=", 1) for line in art["manifest"].read_text().splitlines()
    )
    assert manifest["system"] == "test1"
    assert manifest["kappa"] == repr(EPS / 2.0)
    assert manifest["t_end"] == "1.0"
    assert manifest["steps"] == "2000"
    assert "wall_time_s" in manifest


def test_run_experiment_averaged_stepper(tmp_path):
    """stepper='averaged' integrates the phase-averaged drift: I2 frozen."""
    config = ExperimentConfig(stepper="averaged", kappa="0.01", t_end=2.0)
    traj, _ = run_experiment(config, tmp_path)
    assert traj.stepper == "averaged"
    assert float(np.max(np.abs(traj.I[:, 1] - 1.0))) == 0.0


def test_run_experiment_auto_stride(tmp_path):
    """stride=0 lets the runner cap rows; explicit stride is honored."""
    config = ExperimentConfig(t_end=0.5, stride=25)
    traj, art = run_experiment(config, tmp_path)
    assert art["stride"] == 25
    assert len(traj) == 500 // 25 + 1


# ---------------------------------------------------------------------------
# the jump table (shared session fixture; the heavy asserts live in the
# acceptance tests, here the CSV contract)


def test_table1_csv_contract(table1_outcome):
    """table1.csv: header, four rows, resolved kappas, residuals <= 1e-3."""
    _, artifacts, _, _ = table1_outcome
    lines = artifacts["csv"].read_text().splitlines()
    assert lines[0] == "kappa,t_star,phi_star,predicted,measured,residual"
    assert len(lines) == 5
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert np.array_equal(data[:, 0], [EPS, EPS / 2.0, EPS / 5.0, EPS / 10.0])
    expected_t = 1.0 + 4.0 * math.pi * EPS / data[:, 0]
    assert np.allclose(data[:, 1], expected_t, rtol=0, atol=1e-9)
    assert np.all(data[:, 5] <= 1e-3), f"residual column {data[:, 5]}"


# ---------------------------------------------------------------------------
# figure data


def test_figure_registry():
    expected = {
        "fig1a", "fig1b", "fig1c", "fig1d",
        "fig2a", "fig2b", "fig2c", "fig2d",
        "fig3", "fig4a", "fig4b", "fig4c", "fig5",
    }
    assert set(FIGURES) == expected
    assert FIGURES["fig5"].window is not None


def test_figure_data_unknown_id(tmp_path):
    with pytest.raises(ValueError, match="unknown figure"):
        figure_data("fig9", tmp_path)


def test_figure_data_zoom_window(tmp_path):
    """The zoom figure records every step inside its window and nothing
    before it, and its CSV parses back into a validating Trajectory."""
    spec = FIGURES["fig5"]
    kappa = EPS / 20.0
    traj, art = figure_data("fig5", tmp_path)
    w_lo, w_hi = spec.window
    assert abs(traj.t[0] - w_lo) <= kappa, f"window entry at {traj.t[0]}, expected ~{w_lo}"
    assert w_hi - kappa <= traj.t[-1] <= w_hi + kappa
    gaps = np.diff(traj.t)
    assert np.allclose(gaps, kappa, rtol=0, atol=1e-12), "zoom must record every step"

    back = read_trajectory_csv(art["csv"], kappa=kappa)
    back.validate()
    assert len(back) == len(traj)

    manifest = dict(
        line.split("=", 1) for line in art["manifest"].read_text().splitlines()
    )
    assert manifest["figure"] == "fig5"
    assert manifest["stride"] == "1"
    assert manifest["window"] != ""
