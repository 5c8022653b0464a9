"""Run orchestration, comparison metrics, and file artifacts.

All CSV bodies are deterministic for a given config: 17 significant digits,
no timestamps.  Wall time and similar run-dependent values live only in the
metadata file.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import SolverConfig, plane_source_initial  # noqa: F401  (re-export)
from .diffusion import run_diffusion
from .dlra import run_dlra
from .errors import ConfigError, SolverError
from .fullrank import run_full
from .grid import Grid
from .trajectory import Trajectory

__all__ = [
    "ComparisonResult",
    "RunArtifacts",
    "run",
    "compare",
    "sweep",
    "write_profile_csv",
    "read_profile_csv",
    "write_energy_csv",
    "read_energy_csv",
]

_FMT = "{:.17g}"


@dataclass(frozen=True)
class ComparisonResult:
    """Distance metrics between two density profiles on one grid."""

    rel_l2: float
    linf: float
    energy_gap: float | None = None


@dataclass
class RunArtifacts:
    """Everything a run left behind."""

    trajectory: Trajectory
    out_dir: Path
    profile_paths: list[Path]
    energy_path: Path | None
    metadata_path: Path
    wall_time: float


def _dispatch(config: SolverConfig) -> Trajectory:
    if config.solver == "full":
        return run_full(config)
    if config.solver == "dlra":
        return run_dlra(config)
    if config.solver == "diffusion":
        return run_diffusion(config)
    raise ConfigError(f"unknown solver {config.solver!r}")


def write_profile_csv(path: Path, x: np.ndarray, rho: np.ndarray) -> None:
    rows = "\n".join(
        f"{_FMT.format(xi)},{_FMT.format(ri)}" for xi, ri in zip(x, rho)
    )
    path.write_text("x,rho\n" + rows + "\n")


def read_profile_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]


def write_energy_csv(path: Path, times: np.ndarray, energies: np.ndarray) -> None:
    lines = ["step,t,e,delta_e"]
    prev = energies[0]
    for n, (t, e) in enumerate(zip(times, energies)):
        lines.append(f"{n},{_FMT.format(t)},{_FMT.format(e)},{_FMT.format(e - prev)}")
        prev = e
    path.write_text("\n".join(lines) + "\n")


def read_energy_csv(path: Path) -> dict[str, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {
        "step": data[:, 0].astype(int),
        "t": data[:, 1],
        "e": data[:, 2],
        "delta_e": data[:, 3],
    }


def _write_metadata(path: Path, entries: dict) -> None:
    lines = [f"{k} = {v}" for k, v in entries.items()]
    path.write_text("\n".join(lines) + "\n")


def _metadata_entries(config: SolverConfig, traj: Trajectory | None, status: str,
                      wall: float, failed_step: int | None = None) -> dict:
    entries = {
        "version": __version__,
        "solver": config.solver,
        "status": status,
        "eps": _FMT.format(config.eps),
        "moments": config.moments,
        "nx": config.nx,
        "rank": config.rank,
        "boundary": config.boundary,
        "t_end": _FMT.format(config.t_end),
        "cfl_safety": _FMT.format(config.cfl_safety),
    }
    if traj is not None and traj.cfl is not None:
        entries.update(
            dt=_FMT.format(traj.cfl.dt),
            cfl_mu=_FMT.format(traj.cfl.mu_min),
            cfl_w=_FMT.format(traj.cfl.w_min),
            cfl_hyperbolic=_FMT.format(traj.cfl.hyperbolic_part),
            cfl_parabolic=_FMT.format(traj.cfl.parabolic_part),
        )
    if traj is not None:
        entries["steps"] = traj.steps
    if failed_step is not None:
        entries["failed_step"] = failed_step
    entries["wall_time_s"] = f"{wall:.3f}"
    return entries


def _profile_label(t: float) -> str:
    return f"{t:g}".replace("-", "m").replace(".", "p")


def run(config: SolverConfig, solver: str | None = None,
        output_dir: str | Path | None = None) -> RunArtifacts:
    """Run the configured solver and write profile/energy/metadata artifacts.

    On solver blow-up the metadata file still gets written (status and the
    failing step) before the error propagates.
    """
    if solver is not None:
        config = config.with_updates(solver=solver)
    config.validate()
    out_dir = Path(output_dir if output_dir is not None else config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta_path = out_dir / "metadata.txt"

    started = time.perf_counter()
    try:
        traj = _dispatch(config)
    except SolverError as err:
        wall = time.perf_counter() - started
        step = getattr(err, "step", None)
        _write_metadata(meta_path, _metadata_entries(config, None, "failed", wall, step))
        raise
    wall = time.perf_counter() - started

    grid = config.make_grid()
    profile_paths = []
    for snap in traj.snapshots:
        p = out_dir / f"profile_t{_profile_label(snap.requested_time)}.csv"
        write_profile_csv(p, grid.midpoints, snap.rho)
        profile_paths.append(p)
    final_path = out_dir / "profile_final.csv"
    write_profile_csv(final_path, grid.midpoints, traj.final_rho)
    profile_paths.append(final_path)

    energy_path = None
    if config.energy_trace:
        energy_path = out_dir / "energy.csv"
        write_energy_csv(energy_path, traj.times, traj.energies)

    _write_metadata(meta_path, _metadata_entries(config, traj, "completed", wall))
    return RunArtifacts(
        trajectory=traj,
        out_dir=out_dir,
        profile_paths=profile_paths,
        energy_path=energy_path,
        metadata_path=meta_path,
        wall_time=wall,
    )


def compare(
    rho_a: np.ndarray,
    rho_b: np.ndarray,
    grid: Grid,
    energy_a: np.ndarray | None = None,
    energy_b: np.ndarray | None = None,
) -> ComparisonResult:
    """Distance of profile a from reference profile b on a shared grid.

    rel_l2 is the dx-weighted L2 norm of the difference over the norm of b;
    energy_gap is the largest pointwise energy difference where the two
    traces overlap, when both are given.
    """
    rho_a = np.asarray(rho_a, dtype=float)
    rho_b = np.asarray(rho_b, dtype=float)
    if rho_a.shape != (grid.nx,) or rho_b.shape != (grid.nx,):
        raise ValueError(
            f"profiles with shapes {rho_a.shape}, {rho_b.shape} do not match grid nx={grid.nx}"
        )
    diff = rho_a - rho_b
    num = float(np.sqrt(np.sum(diff * diff) * grid.dx))
    den = float(np.sqrt(np.sum(rho_b * rho_b) * grid.dx))
    if den == 0.0:
        rel = 0.0 if num == 0.0 else float("inf")
    else:
        rel = num / den
    linf = float(np.max(np.abs(diff))) if diff.size else 0.0

    gap = None
    if energy_a is not None and energy_b is not None:
        n = min(len(energy_a), len(energy_b))
        gap = float(np.max(np.abs(np.asarray(energy_a)[:n] - np.asarray(energy_b)[:n])))
    return ComparisonResult(rel_l2=rel, linf=linf, energy_gap=gap)


@dataclass
class SweepPoint:
    """Outcome of one sweep value."""

    value: float
    dt: float
    hyperbolic_part: float
    parabolic_part: float
    rel_l2: float
    linf: float
    status: str


def _sweep_one(config: SolverConfig, vary: str, value: float,
               out_dir: Path, reference: Trajectory | None) -> SweepPoint:
    updates = {"eps": value} if vary == "eps" else {"rank": int(value)}
    cfg = config.with_updates(**updates)
    try:
        art = run(cfg, output_dir=out_dir)
        traj = art.trajectory
        if reference is None:
            ref_traj = run_full(cfg)
        else:
            ref_traj = reference
        grid = cfg.make_grid()
        cmp_res = compare(traj.final_rho, ref_traj.final_rho, grid)
        cfl = traj.cfl
        return SweepPoint(value, cfl.dt, cfl.hyperbolic_part, cfl.parabolic_part,
                          cmp_res.rel_l2, cmp_res.linf, "completed")
    except SolverError:
        return SweepPoint(value, float("nan"), float("nan"), float("nan"),
                          float("nan"), float("nan"), "failed")


def sweep(config: SolverConfig, vary: str, values: list[float],
          output_dir: str | Path | None = None) -> list[SweepPoint]:
    """Run one point per value concurrently; compare each against the full
    solver at the same parameters; write one summary row per point.

    Per-point failures are recorded in their row and do not stop the sweep.
    """
    if vary not in ("eps", "rank"):
        raise ConfigError(f"can only vary eps or rank, got {vary!r}")
    if not values:
        raise ConfigError("sweep needs at least one value")
    base_dir = Path(output_dir if output_dir is not None else config.out_dir)
    base_dir.mkdir(parents=True, exist_ok=True)

    # for rank sweeps the full reference does not depend on the rank: run it once
    reference = None
    if vary == "rank":
        reference = run_full(config.with_updates(rank=int(values[0])))

    def job(value):
        point_dir = base_dir / f"sweep_{vary}_{_profile_label(value)}"
        return _sweep_one(config, vary, value, point_dir, reference)

    with ThreadPoolExecutor(max_workers=min(4, len(values))) as pool:
        points = list(pool.map(job, values))

    lines = ["value,dt,hyperbolic_part,parabolic_part,rel_l2,linf,status"]
    for p in points:
        lines.append(
            f"{_FMT.format(p.value)},{_FMT.format(p.dt)},{_FMT.format(p.hyperbolic_part)},"
            f"{_FMT.format(p.parabolic_part)},{_FMT.format(p.rel_l2)},{_FMT.format(p.linf)},{p.status}"
        )
    (base_dir / "sweep_summary.csv").write_text("\n".join(lines) + "\n")
    return points
