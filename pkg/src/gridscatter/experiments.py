"""Canned experiment pipelines: single runs, the jump table, figure data.

Everything here is deterministic plumbing around the integrators: resolve a
flat key=value configuration, run, and write CSV plus a manifest recording
every resolved parameter.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping

import numpy as np

from .resonance import (
    JumpReport,
    default_windows,
    evaluate_jump,
    locate_resonances,
)
from .stepping import averaged_integrate, integrate, step_count
from .systems import get_system
from .trajectory import Trajectory, TrajectoryPoint, write_csv

__all__ = [
    "ExperimentConfig",
    "FIGURES",
    "FigureSpec",
    "Table1Row",
    "default_stride",
    "figure_data",
    "parse_config_file",
    "resolve_kappa",
    "run_experiment",
    "table1",
    "write_manifest",
]

DEFAULT_EPS = 0.001
ROW_CAP = 200_000


def resolve_kappa(spec: str | float, eps: float) -> float:
    """Turn a step spec into a number: "eps", "eps/N", or a literal.

    "eps/2" keeps the step tied to eps so the same config can be rerun at a
    different eps without editing the ratio.
    """
    if isinstance(spec, (int, float)):
        kappa = float(spec)
    else:
        text = spec.strip()
        if text == "eps":
            kappa = eps
        elif text.startswith("eps/"):
            divisor = float(text[4:])
            kappa = eps / divisor if divisor != 0.0 else math.inf
        else:
            kappa = float(text)
    if not (kappa > 0.0 and math.isfinite(kappa)):
        raise ValueError(f"kappa spec {spec!r} resolves to {kappa}, not a positive real")
    return kappa


def default_stride(n_steps: int) -> int:
    """Downsampling that caps any output file at roughly ROW_CAP rows."""
    return max(1, math.ceil(n_steps / ROW_CAP))


@dataclass(frozen=True)
class ExperimentConfig:
    """One integration run, expressed in flat overridable keys."""

    system: str = "test1"
    stepper: str = "euler"
    eps: float = DEFAULT_EPS
    kappa: str = "eps"
    t_start: float = 0.0
    t_end: float = 14.0
    initial_I: tuple[float, ...] = (-1.0, 1.0)
    initial_phi: float = 0.0
    stride: int = 0  # 0 = pick default_stride
    engine: str = "auto"
    out: str = "trajectory.csv"
    manifest: str = "manifest.txt"


_CONFIG_FIELDS = {f.name: f for f in fields(ExperimentConfig)}


def _coerce(name: str, raw: str):
    kind = _CONFIG_FIELDS[name].type
    if name == "initial_I":
        return tuple(float(v) for v in raw.split(","))
    if kind == "float":
        return float(raw)
    if kind == "int":
        return int(raw)
    return raw


def parse_config_file(path: str | Path) -> dict:
    """Read a flat key=value config; '#' starts a comment line."""
    values: dict = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, raw = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_FIELDS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw.strip())
    return values


def write_manifest(path: str | Path, items: Mapping[str, object]) -> Path:
    path = Path(path)
    lines = []
    for key, value in items.items():
        if isinstance(value, float):
            value = repr(value)
        elif isinstance(value, (tuple, list)):
            value = ",".join(repr(float(v)) for v in value)
        lines.append(f"{key}={value}")
    path.write_text("\n".join(lines) + "\n")
    return path


def run_experiment(config: ExperimentConfig, outdir: str | Path = ".") -> tuple[Trajectory, dict]:
    """Integrate one configuration; write trajectory CSV and manifest."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    system = get_system(config.system, config.eps)
    kappa = resolve_kappa(config.kappa, config.eps)
    n_steps = step_count(config.t_start, config.t_end, kappa)
    stride = config.stride if config.stride else default_stride(n_steps)
    I0 = np.array(config.initial_I, dtype=float)

    started = time.perf_counter()
    if config.stepper == "averaged":
        traj = averaged_integrate(
            system,
            I0,
            config.t_end,
            kappa,
            t_start=config.t_start,
            phi_start=config.initial_phi,
            stride=stride,
        )
    else:
        start = TrajectoryPoint.make(config.t_start, I0, config.initial_phi)
        traj = integrate(
            system, config.stepper, start, kappa, config.t_end,
            stride=stride, engine=config.engine,
        )
    wall = time.perf_counter() - started

    csv_path = outdir / config.out
    write_csv(traj, csv_path)
    manifest_path = write_manifest(
        outdir / config.manifest,
        {
            "system": config.system,
            "stepper": config.stepper,
            "eps": config.eps,
            "kappa_spec": config.kappa,
            "kappa": kappa,
            "t_start": config.t_start,
            "t_end": config.t_end,
            "initial_I": config.initial_I,
            "initial_phi": config.initial_phi,
            "stride": stride,
            "steps": n_steps,
            "rows": len(traj),
            "engine": config.engine,
            "trajectory_csv": csv_path.name,
            "wall_time_s": f"{wall:.6f}",
        },
    )
    artifacts = {
        "trajectory_csv": csv_path,
        "manifest": manifest_path,
        "kappa": kappa,
        "steps": n_steps,
        "stride": stride,
        "rows": len(traj),
        "wall_time_s": wall,
    }
    return traj, artifacts


# ---------------------------------------------------------------------------
# the jump table

TABLE1_KAPPA_SPECS = ("eps", "eps/2", "eps/5", "eps/10")


@dataclass(frozen=True)
class Table1Row:
    kappa_spec: str
    kappa: float
    report: JumpReport


_TABLE1_HEADER = "kappa,t_star,phi_star,predicted,measured,residual"


def table1(
    eps: float = DEFAULT_EPS, outdir: str | Path = ".", engine: str = "auto"
) -> tuple[list[Table1Row], dict]:
    """Predict and measure the designated jump for the four Euler runs.

    For each step kappa in (eps, eps/2, eps/5, eps/10) the designated
    crossing is (n1, n2) = (1, -2), the one the reference table reports;
    the runs integrate the Euler map through it plus the measurement
    window.  Emits table1.csv with the residual column appended.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    system = get_system("test1", eps)
    started = time.perf_counter()
    rows: list[Table1Row] = []
    for spec in TABLE1_KAPPA_SPECS:
        kappa = resolve_kappa(spec, eps)
        t_hi = 1.0 + 2.0 * (2.0 * math.pi) * eps / kappa + 1.0
        events = locate_resonances(system, kappa, (0.5, t_hi), n1_max=1, n2_max=2)
        designated = [e for e in events if e.n2 == -2]
        if len(designated) != 1:
            raise RuntimeError(f"expected one (1, -2) crossing for kappa={spec}, got {events}")
        event = designated[0]
        _, delta_outer = default_windows(event, eps)
        start = TrajectoryPoint.make(0.0, np.array([-1.0, 1.0]), 0.0)
        traj = integrate(
            system, "euler", start, kappa, event.t_star + delta_outer + 0.05, engine=engine
        )
        others = [e for e in events if e is not event]
        report = evaluate_jump(system, traj, event, component=1, others=others)
        rows.append(Table1Row(kappa_spec=spec, kappa=kappa, report=report))
    wall = time.perf_counter() - started

    csv_path = outdir / "table1.csv"
    lines = [_TABLE1_HEADER]
    for row in rows:
        r = row.report
        cells = [
            repr(float(v))
            for v in (
                row.kappa,
                r.event.t_star,
                r.event.phi_star_unwrapped,
                r.predicted,
                r.measured,
                r.residual,
            )
        ]
        lines.append(",".join(cells))
    csv_path.write_text("\n".join(lines) + "\n")
    manifest_path = write_manifest(
        outdir / "table1_manifest.txt",
        {
            "eps": eps,
            "kappa_specs": ",".join(TABLE1_KAPPA_SPECS),
            "stepper": "euler",
            "resonance": "n1=1,n2=-2",
            "engine": engine,
            "csv": csv_path.name,
            "wall_time_s": f"{wall:.6f}",
        },
    )
    return rows, {"csv": csv_path, "manifest": manifest_path, "wall_time_s": wall}


# ---------------------------------------------------------------------------
# figure data

@dataclass(frozen=True)
class FigureSpec:
    """One figure's run parameters; window = emit-only zoom at full stride."""

    figure: str
    system: str
    stepper: str
    kappa: str
    t_end: float
    window: tuple[float, float] | None = None
    description: str = ""


def _figure_table() -> dict[str, FigureSpec]:
    figs = {}
    # Euler and RK4 sweeps over the four steps; span reaches past the last
    # designated crossing at t = 1 + 4*pi*(eps/kappa).
    for letter, spec in zip("abcd", TABLE1_KAPPA_SPECS):
        ratio = 1.0 if spec == "eps" else float(spec[4:])
        t_end = 1.0 + 4.0 * math.pi * ratio + 1.2
        figs[f"fig1{letter}"] = FigureSpec(
            f"fig1{letter}", "test1", "euler", spec, t_end,
            description=f"single-harmonic system, Euler map, kappa={spec}",
        )
        figs[f"fig2{letter}"] = FigureSpec(
            f"fig2{letter}", "test1", "rk4", spec, t_end,
            description=f"single-harmonic system, RK4, kappa={spec}",
        )
    figs["fig3"] = FigureSpec(
        "fig3", "test11", "rk4", "eps/2", 15.0,
        description="11-harmonic system, RK4, kappa=eps/2",
    )
    for letter, spec in zip("abc", ("eps/2", "eps/10", "eps/20")):
        figs[f"fig4{letter}"] = FigureSpec(
            f"fig4{letter}", "testinf", "rk4", spec, 28.0,
            description=f"full-series system, RK4, kappa={spec}",
        )
    zoom_center = 8.0 * math.pi + 1.0
    figs["fig5"] = FigureSpec(
        "fig5", "testinf", "rk4", "eps/20", zoom_center + 0.3,
        window=(zoom_center - 0.3, zoom_center + 0.3),
        description="full-series system, RK4, kappa=eps/20, zoom on the t=8*pi+1 crossing",
    )
    return figs


FIGURES: dict[str, FigureSpec] = _figure_table()


def figure_data(
    figure: str, outdir: str | Path = ".", engine: str = "auto", eps: float = DEFAULT_EPS
) -> tuple[Trajectory, dict]:
    """Integrate one figure's run and write its CSV (+ manifest).

    Zoom figures integrate from t=0 but record only the window, at every
    step; the state entering the window is identical to a full recording
    because the map does not depend on what was recorded.
    """
    try:
        spec = FIGURES[figure]
    except KeyError:
        raise ValueError(f"unknown figure {figure!r}; choose from {sorted(FIGURES)}") from None
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    system = get_system(spec.system, eps)
    kappa = resolve_kappa(spec.kappa, eps)
    start = TrajectoryPoint.make(0.0, np.array([-1.0, 1.0]), 0.0)

    started = time.perf_counter()
    if spec.window is None:
        n_steps = step_count(0.0, spec.t_end, kappa)
        stride = default_stride(n_steps)
        traj = integrate(system, spec.stepper, start, kappa, spec.t_end, stride, engine)
    else:
        w_lo, w_hi = spec.window
        lead_steps = step_count(0.0, w_lo, kappa)
        lead = integrate(
            system, spec.stepper, start, kappa, w_lo, stride=lead_steps, engine=engine
        )
        entry = lead.point(len(lead) - 1)
        n_steps = lead_steps + step_count(entry.t, w_hi, kappa)
        stride = 1
        traj = integrate(system, spec.stepper, entry, kappa, w_hi, stride=1, engine=engine)
    wall = time.perf_counter() - started

    csv_path = outdir / f"{spec.figure}.csv"
    write_csv(traj, csv_path)
    manifest_path = write_manifest(
        outdir / f"{spec.figure}_manifest.txt",
        {
            "figure": spec.figure,
            "description": spec.description,
            "system": spec.system,
            "stepper": spec.stepper,
            "eps": eps,
            "kappa_spec": spec.kappa,
            "kappa": kappa,
            "t_end": spec.t_end,
            "window": "" if spec.window is None else f"{spec.window[0]!r}..{spec.window[1]!r}",
            "stride": stride,
            "steps": n_steps,
            "rows": len(traj),
            "engine": engine,
            "csv": csv_path.name,
            "wall_time_s": f"{wall:.6f}",
        },
    )
    artifacts = {
        "csv": csv_path,
        "manifest": manifest_path,
        "rows": len(traj),
        "wall_time_s": wall,
    }
    return traj, artifacts
