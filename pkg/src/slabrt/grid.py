"""Staggered 1-D grid, upwind stencils, the discrete advection operator, and
the discrete energy.

Density values live on cell midpoints, microscopic moment vectors on cell
interfaces.  With periodic boundaries the grid carries nx interface slots
(slot k is the right edge of cell k, wrap-around indexing); with vacuum
boundaries it carries nx + 1 slots including both domain edges, and every
out-of-range neighbor (interface or midpoint) is a zero ghost value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BlowUpError
from .quadrature import FluxOperators

__all__ = [
    "Grid",
    "SigmaField",
    "FullState",
    "d_plus",
    "d_minus",
    "density_gradient",
    "flux_divergence",
    "advection_apply",
    "energy",
]

PERIODIC = "periodic"
VACUUM = "vacuum"


@dataclass(frozen=True)
class Grid:
    """Equidistant staggered grid on [x_left, x_right] with nx cells."""

    x_left: float
    x_right: float
    nx: int
    boundary: str = VACUUM
    dx: float = field(init=False)
    midpoints: np.ndarray = field(init=False)
    interfaces: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.nx < 1:
            raise ValueError(f"nx must be >= 1, got {self.nx}")
        if not self.x_right > self.x_left:
            raise ValueError(f"empty domain [{self.x_left}, {self.x_right}]")
        if self.boundary not in (PERIODIC, VACUUM):
            raise ValueError(f"unknown boundary mode {self.boundary!r}")
        dx = (self.x_right - self.x_left) / self.nx
        object.__setattr__(self, "dx", dx)
        object.__setattr__(
            self, "midpoints", self.x_left + (np.arange(self.nx) + 0.5) * dx
        )
        if self.boundary == PERIODIC:
            iface = self.x_left + (np.arange(self.nx) + 1.0) * dx
        else:
            iface = self.x_left + np.arange(self.nx + 1) * dx
        object.__setattr__(self, "interfaces", iface)

    @property
    def n_interfaces(self) -> int:
        return self.nx if self.boundary == PERIODIC else self.nx + 1

    @property
    def periodic(self) -> bool:
        return self.boundary == PERIODIC


@dataclass(frozen=True)
class SigmaField:
    """Scattering cross-section sampled at the interfaces, with its minimum."""

    values: np.ndarray
    sigma0: float

    @classmethod
    def from_spec(cls, spec: float | np.ndarray, grid: Grid) -> "SigmaField":
        """Build from a constant or a per-interface table; values must be > 0."""
        if np.isscalar(spec):
            values = np.full(grid.n_interfaces, float(spec))
        else:
            values = np.asarray(spec, dtype=float).copy()
            if values.shape != (grid.n_interfaces,):
                raise ValueError(
                    f"sigma table has shape {values.shape}, expected ({grid.n_interfaces},)"
                )
        if not np.all(values > 0.0):
            raise ValueError("sigma must be positive everywhere")
        return cls(values=values, sigma0=float(values.min()))


@dataclass
class FullState:
    """Density on midpoints plus the microscopic moment field on interfaces."""

    rho: np.ndarray          # (nx,)
    g: np.ndarray            # (n_interfaces, n_moments)
    time: float = 0.0

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.g = np.asarray(self.g, dtype=float)
        if self.g.ndim != 2:
            raise ValueError(f"g must be 2-D (interfaces x moments), got ndim={self.g.ndim}")
        if not (np.all(np.isfinite(self.rho)) and np.all(np.isfinite(self.g))):
            raise BlowUpError("non-finite entries in state", operator="FullState")


def _check_interface_field(f: np.ndarray, grid: Grid, name: str) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape[0] != grid.n_interfaces:
        raise ValueError(
            f"{name}: leading dimension {f.shape[0]} does not match "
            f"{grid.n_interfaces} interfaces"
        )
    return f


def d_plus(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Forward difference (f[k+1] - f[k]) / dx on an interface-indexed field."""
    f = _check_interface_field(f, grid, "d_plus")
    if grid.periodic:
        return (np.roll(f, -1, axis=0) - f) / grid.dx
    out = np.empty_like(f)
    out[:-1] = f[1:] - f[:-1]
    out[-1] = -f[-1]
    return out / grid.dx


def d_minus(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Backward difference (f[k] - f[k-1]) / dx on an interface-indexed field."""
    f = _check_interface_field(f, grid, "d_minus")
    if grid.periodic:
        return (f - np.roll(f, 1, axis=0)) / grid.dx
    out = np.empty_like(f)
    out[1:] = f[1:] - f[:-1]
    out[0] = f[0]
    return out / grid.dx


def density_gradient(rho: np.ndarray, grid: Grid) -> np.ndarray:
    """Difference of adjacent midpoint densities, evaluated at each interface."""
    rho = np.asarray(rho, dtype=float)
    if rho.shape[0] != grid.nx:
        raise ValueError(f"density has {rho.shape[0]} entries, expected {grid.nx}")
    if grid.periodic:
        return (np.roll(rho, -1) - rho) / grid.dx
    out = np.empty(grid.nx + 1)
    out[0] = rho[0]
    out[1:-1] = rho[1:] - rho[:-1]
    out[-1] = -rho[-1]
    return out / grid.dx


def flux_divergence(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Difference of the two cell-edge values of an interface field, per cell."""
    f = _check_interface_field(f, grid, "flux_divergence")
    if grid.periodic:
        return (f - np.roll(f, 1, axis=0)) / grid.dx
    return (f[1:] - f[:-1]) / grid.dx


def advection_apply(ops: FluxOperators, g: np.ndarray, grid: Grid) -> np.ndarray:
    """Upwind advection A_plus D^- g + A_minus D^+ g, rowwise over interfaces."""
    g = _check_interface_field(g, grid, "advection_apply")
    if g.ndim != 2 or g.shape[1] != ops.n_moments:
        raise ValueError(
            f"moment field has shape {g.shape}, expected ({grid.n_interfaces}, {ops.n_moments})"
        )
    return d_minus(g, grid) @ ops.A_plus + d_plus(g, grid) @ ops.A_minus


def energy(state: FullState, eps: float, grid: Grid) -> float:
    """Discrete energy  sum_j rho_j^2 dx + eps^2 sum_k |g_k|^2 dx."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    with np.errstate(over="ignore"):
        rho_part = float(state.rho @ state.rho) * grid.dx
        g_part = float(np.sum(state.g * state.g)) * grid.dx
        return rho_part + eps * eps * g_part
