"""Shared time-stepping driver and trajectory record for the three solvers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, TYPE_CHECKING

import numpy as np

from .errors import BlowUpError

if TYPE_CHECKING:
    from .fullrank import CflReport

__all__ = ["Snapshot", "Trajectory", "run_loop"]

_REL_TIME_TOL = 1e-12


@dataclass
class Snapshot:
    """Density profile captured at the first step whose time reached the request."""

    requested_time: float
    time: float
    step: int
    rho: np.ndarray


@dataclass
class Trajectory:
    """Energy trace, captured profiles, and final state of one run."""

    solver: str
    dt: float
    times: np.ndarray                 # time after each step, including t=0
    energies: np.ndarray              # same length as times
    snapshots: list[Snapshot]
    final_rho: np.ndarray
    final_time: float
    steps: int
    cfl: "CflReport | None" = None
    final_state: Any = None           # FullState for the full solver
    final_lowrank: Any = None         # LowRankState for the DLRA solver


def run_loop(
    state: Any,
    *,
    step: Callable[[Any, float], Any],
    energy_of: Callable[[Any], float],
    rho_of: Callable[[Any], np.ndarray],
    dt: float,
    t_end: float,
    profile_times: list[float],
    solver: str,
    cfl: "CflReport | None" = None,
) -> tuple[Any, Trajectory]:
    """March `state` to t_end with fixed dt, shortening the last step to land
    exactly on t_end.  Energy is recorded every step; the density profile is
    captured at the first step whose time reaches each requested output time
    (requests at or past t_end resolve to the final state).
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_end < 0:
        raise ValueError(f"t_end must be >= 0, got {t_end}")

    tol = _REL_TIME_TOL * max(1.0, t_end)
    pending = sorted(set(profile_times))
    snapshots: list[Snapshot] = []
    times = [0.0]
    energies = [energy_of(state)]
    t = 0.0
    n = 0

    def capture(upto: float):
        while pending and pending[0] <= upto + tol:
            snapshots.append(Snapshot(pending.pop(0), t, n, rho_of(state).copy()))

    capture(0.0)
    while t_end - t > tol:
        h = min(dt, t_end - t)
        try:
            state = step(state, h)
        except BlowUpError as err:
            err.step = n + 1
            raise
        t = t_end if t_end - (t + h) <= tol else t + h
        n += 1
        times.append(t)
        energies.append(energy_of(state))
        capture(t)

    # requests beyond the reached horizon resolve to the final profile
    while pending:
        snapshots.append(Snapshot(pending.pop(0), t, n, rho_of(state).copy()))

    traj = Trajectory(
        solver=solver,
        dt=dt,
        times=np.asarray(times),
        energies=np.asarray(energies),
        snapshots=snapshots,
        final_rho=rho_of(state).copy(),
        final_time=t,
        steps=n,
        cfl=cfl,
    )
    return state, traj
