"""Fully discrete micro-macro IMEX scheme and the regime-aware CFL policy.

One step updates the microscopic moments explicitly in advection and in the
density-gradient source, implicitly (exactly, by scalar division) in the
scattering relaxation, and then advances the density with the fresh first
moment.  The admissible step size blends a hyperbolic eps*dx term with a
parabolic sigma0*dx^2 term, minimized over the quadrature nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BlowUpError, NumericalError
from .grid import (
    FullState,
    Grid,
    SigmaField,
    advection_apply,
    density_gradient,
    energy,
    flux_divergence,
)
from .quadrature import FluxOperators, QuadratureSet
from .trajectory import Trajectory, run_loop

__all__ = ["CflReport", "cfl_dt", "full_step", "run_full"]


@dataclass(frozen=True)
class CflReport:
    """Chosen step size and the quadrature node attaining the minimum."""

    dt: float
    minimizing_k: int
    mu_min: float
    w_min: float
    hyperbolic_part: float      # eps * dx / |mu_k| at the minimizer
    parabolic_part: float       # sigma0 * dx^2 / (2 mu_k^2) at the minimizer
    safety: float


def cfl_dt(
    quad: QuadratureSet,
    n_moments: int,
    eps: float,
    dx: float,
    sigma0: float,
    safety: float = 1.0,
) -> CflReport:
    """Step-size bound  safety * min_k (eps dx/|mu_k| + sigma0 dx^2/(2 mu_k^2))
    / (2 + (N+1) w_k)  over nodes with mu_k != 0.

    Ties between +-mu_k pairs (their bounds are identical by symmetry) break
    toward the negative node.  eps = 0 is allowed and leaves the pure
    parabolic bound, which the diffusion solver reuses.
    """
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if dx <= 0 or sigma0 <= 0:
        raise ValueError(f"dx and sigma0 must be positive, got dx={dx}, sigma0={sigma0}")
    if safety <= 0:
        raise ValueError(f"safety must be positive, got {safety}")

    mu = quad.nodes
    w = quad.weights
    nonzero = mu != 0.0
    if not np.any(nonzero):
        raise NumericalError("all quadrature nodes are zero; cannot form a CFL bound")

    with np.errstate(divide="ignore", invalid="ignore"):
        hyp = np.where(nonzero, eps * dx / np.abs(mu), np.inf)
        par = np.where(nonzero, sigma0 * dx * dx / (2.0 * mu * mu), np.inf)
    bound = np.where(nonzero, (hyp + par) / (2.0 + (n_moments + 1) * w), np.inf)
    k = int(np.argmin(bound))  # first minimum; nodes ascend, so negative mu wins ties
    return CflReport(
        dt=float(safety * bound[k]),
        minimizing_k=k,
        mu_min=float(mu[k]),
        w_min=float(w[k]),
        hyperbolic_part=float(hyp[k]),
        parabolic_part=float(par[k]),
        safety=float(safety),
    )


def full_step(
    state: FullState,
    ops: FluxOperators,
    grid: Grid,
    sigma: SigmaField,
    eps: float,
    dt: float,
) -> FullState:
    """Advance the micro-macro state by one IMEX step of size dt."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if state.rho.shape[0] != grid.nx:
        raise ValueError(
            f"state has {state.rho.shape[0]} densities, grid expects {grid.nx}"
        )

    # past the stability bound fields overflow; the isfinite check reports it
    with np.errstate(over="ignore", invalid="ignore"):
        grad = density_gradient(state.rho, grid)
        lg = advection_apply(ops, state.g, grid)
        rhs = state.g - (dt / eps) * lg - (dt / eps**2) * np.outer(grad, ops.a)
        g_new = rhs / (1.0 + dt * sigma.values[:, None] / eps**2)
        rho_new = state.rho - dt * ops.a0 * flux_divergence(g_new[:, 0], grid)

    if not (np.all(np.isfinite(g_new)) and np.all(np.isfinite(rho_new))):
        raise BlowUpError(
            f"non-finite field after step at t={state.time:.6g} (dt={dt:.3e})",
            operator="full_step",
        )
    return FullState(rho=rho_new, g=g_new, time=state.time + dt)


def run_full(config) -> Trajectory:
    """Run the full moment solver as described by a SolverConfig."""
    grid = config.make_grid()
    sigma = config.make_sigma(grid)
    ops = config.make_operators()
    state = config.initial_state(grid)
    report = cfl_dt(ops.quad, config.moments, config.eps, grid.dx, sigma.sigma0, config.cfl_safety)

    def step(s: FullState, h: float) -> FullState:
        return full_step(s, ops, grid, sigma, config.eps, h)

    state, traj = run_loop(
        state,
        step=step,
        energy_of=lambda s: energy(s, config.eps, grid),
        rho_of=lambda s: s.rho,
        dt=report.dt,
        t_end=config.t_end,
        profile_times=config.profile_times,
        solver="full",
        cfl=report,
    )
    traj.final_state = state
    return traj
