"""Energy-stable micro-macro moment and dynamical low-rank solvers for the
1-D radiative transfer equation in diffusive scaling."""

__version__ = "0.1.0"

from .quadrature import (
    QuadratureSet,
    FluxOperators,
    gauss_legendre,
    eval_legendre_orthonormal,
    recurrence_coeff,
    build_operators,
)
from .grid import (
    Grid,
    SigmaField,
    FullState,
    d_plus,
    d_minus,
    density_gradient,
    flux_divergence,
    advection_apply,
    energy,
)
from .fullrank import CflReport, cfl_dt, full_step, run_full
from .dlra import (
    LowRankState,
    orthonormalize,
    init_lowrank,
    k_step,
    l_step,
    s_step,
    dlra_step,
    reconstruct,
    lowrank_energy,
    run_dlra,
)
from .diffusion import diffusion_step, run_diffusion
from .config import SolverConfig, plane_source_initial
from .errors import BlowUpError, ConfigError, NumericalError, SolverError
from .trajectory import Snapshot, Trajectory

__all__ = [
    "QuadratureSet", "FluxOperators", "gauss_legendre",
    "eval_legendre_orthonormal", "recurrence_coeff", "build_operators",
    "Grid", "SigmaField", "FullState", "d_plus", "d_minus",
    "density_gradient", "flux_divergence", "advection_apply", "energy",
    "CflReport", "cfl_dt", "full_step", "run_full",
    "LowRankState", "orthonormalize", "init_lowrank",
    "k_step", "l_step", "s_step", "dlra_step", "reconstruct",
    "lowrank_energy", "run_dlra",
    "diffusion_step", "run_diffusion",
    "SolverConfig", "plane_source_initial",
    "BlowUpError", "ConfigError", "NumericalError", "SolverError",
    "Snapshot", "Trajectory",
]
