"""Explicit diffusion solver used as the strong-scattering reference.

The update applies the same staggered stencils as the kinetic scheme: the
density gradient at interfaces, scaled by 1/(3 sigma) there, then the
divergence back at midpoints.  It is the fixed-mesh limit of the kinetic
micro equilibrium g = -(1/sigma) grad(rho) a.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid, SigmaField, density_gradient, flux_divergence
from .errors import BlowUpError
from .quadrature import gauss_legendre
from .trajectory import Trajectory, run_loop

__all__ = ["diffusion_step", "run_diffusion"]


def diffusion_step(rho: np.ndarray, sigma: SigmaField, grid: Grid, dt: float) -> np.ndarray:
    """Advance the density by one explicit step of d_t rho = (1/3) d_x (sigma^-1 d_x rho)."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    flux = density_gradient(rho, grid) / sigma.values
    rho_new = rho + (dt / 3.0) * flux_divergence(flux, grid)
    if not np.all(np.isfinite(rho_new)):
        raise BlowUpError("non-finite density after step", operator="diffusion_step")
    return rho_new


def run_diffusion(config) -> Trajectory:
    """Run the diffusion solver; the step size is the parabolic part of the
    kinetic CFL bound (its eps -> 0 value)."""
    from .fullrank import cfl_dt

    grid = config.make_grid()
    sigma = config.make_sigma(grid)
    quad = gauss_legendre(config.moments + 1)
    state0 = config.initial_state(grid)
    report = cfl_dt(quad, config.moments, 0.0, grid.dx, sigma.sigma0, config.cfl_safety)

    def step(rho, h):
        return diffusion_step(rho, sigma, grid, h)

    rho, traj = run_loop(
        state0.rho,
        step=step,
        energy_of=lambda r: float(r @ r) * grid.dx,
        rho_of=lambda r: r,
        dt=report.dt,
        t_end=config.t_end,
        profile_times=config.profile_times,
        solver="diffusion",
        cfl=report,
    )
    return traj
