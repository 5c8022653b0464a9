"""Command-line entry point: run, sweep, check-cfl.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bench import run, sweep
from .config import SolverConfig
from .errors import ConfigError, SolverError
from .fullrank import cfl_dt
from .quadrature import gauss_legendre


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slabrt",
        description="Micro-macro moment and low-rank solvers for 1-D radiative transfer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one solver and write CSV artifacts")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--solver", choices=("full", "dlra", "diffusion"))
    p_run.add_argument("--output-dir")

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--vary", required=True, choices=("eps", "rank"))
    p_sweep.add_argument("--values", required=True, help="comma-separated list")
    p_sweep.add_argument("--output-dir")

    p_cfl = sub.add_parser("check-cfl", help="print the step-size bound as JSON")
    p_cfl.add_argument("--config", required=True)
    return parser


def _cmd_run(args) -> int:
    config = SolverConfig.from_file(args.config)
    art = run(config, solver=args.solver, output_dir=args.output_dir)
    traj = art.trajectory
    print(
        f"{traj.solver}: {traj.steps} steps to t={traj.final_time:g} "
        f"(dt={traj.dt:.6e}), artifacts in {art.out_dir}"
    )
    return 0


def _cmd_sweep(args) -> int:
    config = SolverConfig.from_file(args.config)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError as err:
        raise ConfigError(f"bad --values list: {err}") from err
    if not values:
        raise ConfigError("--values is empty")
    points = sweep(config, args.vary, values, output_dir=args.output_dir)
    for p in points:
        print(f"{args.vary}={p.value:g}: dt={p.dt:.6e} rel_l2={p.rel_l2:.3e} {p.status}")
    return 0 if all(p.status == "completed" for p in points) else 2


def _cmd_check_cfl(args) -> int:
    config = SolverConfig.from_file(args.config)
    grid = config.make_grid()
    sigma = config.make_sigma(grid)
    quad = gauss_legendre(config.moments + 1)
    report = cfl_dt(quad, config.moments, config.eps, grid.dx, sigma.sigma0, config.cfl_safety)
    print(json.dumps({
        "dt": report.dt,
        "minimizing_k": report.minimizing_k,
        "mu_min": report.mu_min,
        "w_min": report.w_min,
        "hyperbolic_part": report.hyperbolic_part,
        "parabolic_part": report.parabolic_part,
        "safety": report.safety,
    }))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_check_cfl(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    except SolverError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
