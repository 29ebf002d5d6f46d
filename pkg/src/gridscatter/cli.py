"""Command-line front end: run, table1, figures, resonances, predict."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import GridscatterError
from .experiments import (
    FIGURES,
    DEFAULT_EPS,
    ExperimentConfig,
    figure_data,
    parse_config_file,
    resolve_kappa,
    run_experiment,
    table1,
)
from .resonance import locate_resonances, phase_at_resonance, predict_jump
from .stepping import integrate, step_count
from .systems import SYSTEM_BUILDERS, get_system
from .trajectory import TrajectoryPoint

_SYSTEM_IDS = sorted(SYSTEM_BUILDERS)
_CONFIG_FLAGS = (
    "system", "stepper", "eps", "kappa", "t_start", "t_end",
    "initial_I", "initial_phi", "stride", "engine", "out", "manifest",
)


def _parse_initial_I(raw: str) -> tuple[float, ...]:
    return tuple(float(v) for v in raw.split(","))


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file; flags override it")
    p.add_argument("--system", choices=_SYSTEM_IDS)
    p.add_argument("--stepper", choices=["euler", "rk4", "reference", "averaged"])
    p.add_argument("--eps", type=float)
    p.add_argument("--kappa", help='step size: "eps", "eps/N", or a literal')
    p.add_argument("--t-start", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--initial-I", help='comma-separated slow start, e.g. "-1,1"')
    p.add_argument("--initial-phi", type=float)
    p.add_argument("--stride", type=int, help="record every stride-th step (0 = auto)")
    p.add_argument("--engine", choices=["auto", "fast", "python"])
    p.add_argument("--out", help="trajectory CSV filename")
    p.add_argument("--manifest", help="manifest filename")
    p.add_argument("--outdir", default=".", help="output directory")


def _cmd_run(args: argparse.Namespace) -> int:
    merged: dict = {}
    if args.config:
        merged.update(parse_config_file(args.config))
    for key in _CONFIG_FLAGS:
        value = getattr(args, key)
        if value is None:
            continue
        merged[key] = _parse_initial_I(value) if key == "initial_I" else value
    config = ExperimentConfig(**merged)
    traj, art = run_experiment(config, args.outdir)
    print(
        f"wrote {art['trajectory_csv']} ({art['rows']} rows, {art['steps']} steps, "
        f"kappa={art['kappa']!r}, {art['wall_time_s']:.3f}s)"
    )
    print(f"wrote {art['manifest']}")
    if args.render:
        from .plotting import render_trajectory

        png = Path(args.outdir) / (Path(config.out).stem + ".png")
        render_trajectory(traj, png, title=f"{config.system}, {config.stepper}")
        print(f"wrote {png}")
    return 0


def _cmd_table1(args: argparse.Namespace) -> int:
    rows, art = table1(eps=args.eps, outdir=args.outdir, engine=args.engine)
    print(f"{'kappa':>8} {'t_star':>14} {'phi_star':>18} {'predicted':>11} "
          f"{'measured':>11} {'residual':>10}")
    for row in rows:
        r = row.report
        print(
            f"{row.kappa_spec:>8} {r.event.t_star:>14.6f} "
            f"{r.event.phi_star_unwrapped:>18.3f} {r.predicted:>11.5f} "
            f"{r.measured:>11.5f} {r.residual:>10.2e}"
        )
    print(f"wrote {art['csv']}")
    print(f"wrote {art['manifest']}")
    return 0


def _cmd_figures(args: argparse.Namespace) -> int:
    targets = sorted(FIGURES) if args.figure == "all" else [args.figure]
    for figure in targets:
        traj, art = figure_data(figure, outdir=args.outdir, engine=args.engine, eps=args.eps)
        line = f"{figure}: wrote {art['csv']} ({art['rows']} rows)"
        if not args.no_render:
            from .plotting import render_trajectory

            png = Path(args.outdir) / f"{figure}.png"
            render_trajectory(traj, png, title=FIGURES[figure].description)
            line += f", {png.name}"
        print(line)
    return 0


def _cmd_resonances(args: argparse.Namespace) -> int:
    system = get_system(args.system, args.eps)
    kappa = resolve_kappa(args.kappa, args.eps)
    events = locate_resonances(
        system, kappa, (args.t_start, args.t_end),
        n1_max=args.n1_max, n2_max=args.n2_max,
    )
    print(f"{'n1':>3} {'n2':>4} {'t_star':>18} {'omega_prime':>12}")
    for e in events:
        print(f"{e.n1:>3} {e.n2:>4} {e.t_star:>18.12f} {e.omega_prime_star:>12.6f}")
    print(f"{len(events)} crossings in [{args.t_start}, {args.t_end}] "
          f"(kappa={kappa!r}, n1<={args.n1_max}, |n2|<={args.n2_max})")
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    system = get_system(args.system, args.eps)
    kappa = resolve_kappa(args.kappa, args.eps)
    events = locate_resonances(
        system, kappa, (args.t_start, args.t_end),
        n1_max=args.n1, n2_max=abs(args.n2),
    )
    matches = [e for e in events if e.n1 == args.n1 and e.n2 == args.n2]
    if not matches:
        raise ValueError(
            f"no ({args.n1}, {args.n2}) crossing in [{args.t_start}, {args.t_end}]; "
            f"widen --t-end"
        )
    event = matches[0]
    start = TrajectoryPoint.make(
        args.t_start, np.array(_parse_initial_I(args.initial_I)), args.initial_phi
    )
    t_end = event.t_star + 2.0 * kappa
    n_steps = step_count(args.t_start, t_end, kappa)
    stride = max(1, n_steps // 200_000)
    traj = integrate(system, args.stepper, start, kappa, t_end, stride=stride)
    event = event.with_phase(phase_at_resonance(traj, event, system))
    predicted = predict_jump(event, system, component=args.component)
    print(f"n1={event.n1} n2={event.n2}")
    print(f"t_star={event.t_star!r}")
    print(f"phi_star={event.phi_star_unwrapped!r}")
    print(f"Omega={event.Omega!r}")
    print(f"predicted={predicted!r}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridscatter",
        description=(
            "Demonstrate and quantify the slow-variable jumps a fixed "
            "integration step introduces at resonances between a system's "
            "fast phase and the sampling frequency 2*pi/step."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one configuration, write CSV + manifest")
    _add_run_flags(p_run)
    p_run.add_argument("--render", action="store_true", help="also write a PNG of I2(t)")
    p_run.set_defaults(func=_cmd_run)

    p_t1 = sub.add_parser("table1", help="predict and measure the four designated jumps")
    p_t1.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p_t1.add_argument("--outdir", default=".")
    p_t1.add_argument("--engine", choices=["auto", "fast", "python"], default="auto")
    p_t1.set_defaults(func=_cmd_table1)

    p_fig = sub.add_parser("figures", help="emit figure data CSVs (and PNG renders)")
    p_fig.add_argument("--figure", default="all", choices=sorted(FIGURES) + ["all"])
    p_fig.add_argument("--outdir", default="figures")
    p_fig.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p_fig.add_argument("--engine", choices=["auto", "fast", "python"], default="auto")
    p_fig.add_argument("--no-render", action="store_true", help="skip PNG rendering")
    p_fig.set_defaults(func=_cmd_figures)

    p_res = sub.add_parser("resonances", help="list step-induced crossings in a time span")
    p_res.add_argument("--system", choices=_SYSTEM_IDS, default="test1")
    p_res.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p_res.add_argument("--kappa", default="eps")
    p_res.add_argument("--t-start", type=float, default=0.0)
    p_res.add_argument("--t-end", type=float, default=14.0)
    p_res.add_argument("--n1-max", type=int, default=11)
    p_res.add_argument("--n2-max", type=int, default=40)
    p_res.set_defaults(func=_cmd_resonances)

    p_pred = sub.add_parser("predict", help="stationary-phase jump for one (n1, n2) crossing")
    p_pred.add_argument("--system", choices=_SYSTEM_IDS, default="test1")
    p_pred.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p_pred.add_argument("--kappa", default="eps")
    p_pred.add_argument("--n1", type=int, required=True)
    p_pred.add_argument("--n2", type=int, required=True)
    p_pred.add_argument("--component", type=int, default=1)
    p_pred.add_argument("--stepper", choices=["euler", "rk4", "reference"], default="euler")
    p_pred.add_argument("--t-start", type=float, default=0.0)
    p_pred.add_argument("--t-end", type=float, default=14.0)
    p_pred.add_argument("--initial-I", default="-1,1")
    p_pred.add_argument("--initial-phi", type=float, default=0.0)
    p_pred.set_defaults(func=_cmd_predict)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GridscatterError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
