"""Command-line surface: every subcommand end to end in a temp directory.

main() is called in-process with argv lists; exit codes, emitted files,
and printed key=value lines are the contract under test.  Domain errors
return 1 with an "error:" line on stderr, argparse usage errors exit 2.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from gridscatter import read_trajectory_csv
from gridscatter.cli import main

TWO_PI = 2.0 * math.pi


def _manifest(path) -> dict:
    return dict(line.split("=", 1) for line in path.read_text().splitlines())


# ---------------------------------------------------------------------------
# run


def test_run_writes_csv_and_manifest(tmp_path, capsys):
    code = main([
        "run", "--system", "test1", "--kappa", "eps", "--t-end", "1.5",
        "--outdir", str(tmp_path),
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "wrote" in out
    traj = read_trajectory_csv(tmp_path / "trajectory.csv")
    traj.validate()
    assert len(traj) == 1501
    m = _manifest(tmp_path / "manifest.txt")
    assert m["t_end"] == "1.5"
    assert m["kappa"] == "0.001"


def test_run_flags_override_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("system = test11\nt_end = 2.0\nout = custom.csv\n")
    code = main([
        "run", "--config", str(cfg), "--t-end", "3.0", "--outdir", str(tmp_path),
    ])
    assert code == 0
    m = _manifest(tmp_path / "manifest.txt")
    assert m["system"] == "test11", "config value must survive"
    assert m["t_end"] == "3.0", "flag must override the config file"
    assert (tmp_path / "custom.csv").exists()


def test_run_averaged_stepper(tmp_path):
    code = main([
        "run", "--stepper", "averaged", "--kappa", "0.01", "--t-end", "2.0",
        "--outdir", str(tmp_path),
    ])
    assert code == 0
    traj = read_trajectory_csv(tmp_path / "trajectory.csv")
    assert float(np.max(np.abs(traj.I[:, 1] - 1.0))) == 0.0


def test_run_render_writes_png(tmp_path):
    code = main([
        "run", "--t-end", "1.0", "--outdir", str(tmp_path), "--render",
    ])
    assert code == 0
    png = tmp_path / "trajectory.png"
    assert png.exists() and png.stat().st_size > 0
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_run_bad_config_key_exits_1(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("step_size = 0.001\n")
    code = main(["run", "--config", str(cfg), "--outdir", str(tmp_path)])
    assert code == 1
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# table1


def test_table1_subcommand(tmp_path, capsys):
    code = main(["table1", "--outdir", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "kappa" in out and "predicted" in out
    lines = (tmp_path / "table1.csv").read_text().splitlines()
    assert len(lines) == 5
    assert (tmp_path / "table1_manifest.txt").exists()


# ---------------------------------------------------------------------------
# figures


def test_figures_single_with_render(tmp_path, capsys):
    code = main(["figures", "--figure", "fig1a", "--outdir", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "fig1a.csv").exists()
    assert (tmp_path / "fig1a.png").exists()
    assert (tmp_path / "fig1a_manifest.txt").exists()
    read_trajectory_csv(tmp_path / "fig1a.csv").validate()


def test_figures_no_render_skips_png(tmp_path):
    code = main([
        "figures", "--figure", "fig1a", "--outdir", str(tmp_path), "--no-render",
    ])
    assert code == 0
    assert (tmp_path / "fig1a.csv").exists()
    assert not (tmp_path / "fig1a.png").exists()


def test_figures_rejects_unknown_id(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["figures", "--figure", "fig9", "--outdir", str(tmp_path)])
    assert exc.value.code == 2


# ---------------------------------------------------------------------------
# resonances


def test_resonances_lists_crossings(capsys):
    code = main([
        "resonances", "--system", "test11", "--kappa", "eps/2",
        "--t-start", "0.5", "--t-end", "14", "--n1-max", "4",
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "6 crossings" in out, out
    first = out.splitlines()[1].split()
    assert first[:2] == ["4", "-1"], f"first crossing row: {first}"
    assert abs(float(first[2]) - (1.0 + math.pi)) <= 1e-9


# ---------------------------------------------------------------------------
# predict


def test_predict_reports_designated_jump(capsys):
    code = main(["predict", "--system", "test1", "--kappa", "eps", "--n1", "1", "--n2", "-2"])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n1=1 n2=-2"
    values = dict(line.split("=", 1) for line in lines[1:])
    assert abs(float(values["t_star"]) - (1.0 + 2.0 * TWO_PI)) <= 1e-9
    assert abs(float(values["predicted"]) - 0.0653) <= 1e-3
    assert float(values["Omega"]) == TWO_PI / 0.001


def test_predict_without_crossing_exits_1(capsys):
    code = main([
        "predict", "--system", "test1", "--kappa", "eps/10",
        "--n1", "1", "--n2", "-2", "--t-end", "14",
    ])
    assert code == 1
    assert "widen --t-end" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# parser basics


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
