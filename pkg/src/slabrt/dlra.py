"""Fixed-rank basis-update & Galerkin integrator for the microscopic field.

One step evolves the spatial and moment bases through independent K and L
substeps (they share no data and could run in parallel), orthonormalizes,
projects the old coefficients onto the fresh bases, and closes with a
Galerkin coefficient update; scattering is implicit in every substep.  The
density update then uses the reconstructed first moment.  All tests compare
reconstructions X S V^t, never raw factors, since the factorization is only
defined up to orthogonal rotations.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BlowUpError, NumericalError
from .grid import Grid, SigmaField, d_minus, d_plus, density_gradient, flux_divergence
from .quadrature import FluxOperators
from .trajectory import Trajectory, run_loop

__all__ = [
    "LowRankState",
    "OrthoResult",
    "orthonormalize",
    "init_lowrank",
    "k_step",
    "l_step",
    "s_step",
    "dlra_step",
    "reconstruct",
    "lowrank_energy",
    "run_dlra",
    "work_meter",
]


class _WorkMeter:
    """Tally of multiply-add counts of the dense kernels actually executed.

    Inactive by default and not thread-safe; activate through work_meter()
    in single-threaded measurement code only.
    """

    def __init__(self):
        self.active = False
        self.fma = 0

    def add(self, n: int):
        if self.active:
            self.fma += int(n)


_METER = _WorkMeter()


@contextmanager
def work_meter():
    """Context manager that counts dense-kernel work of the enclosed calls."""
    _METER.fma = 0
    _METER.active = True
    try:
        yield _METER
    finally:
        _METER.active = False


def _mm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a @ b with its multiply-add count tallied."""
    _METER.add(a.shape[0] * a.shape[1] * (b.shape[1] if b.ndim == 2 else 1))
    return a @ b


def _solve_spd(system: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve the symmetric positive definite system; diagnose failures."""
    try:
        np.linalg.cholesky(system)
    except np.linalg.LinAlgError as err:
        cond = float(np.linalg.cond(system))
        raise NumericalError(
            f"implicit scattering system is not SPD (cond ~ {cond:.3e})"
        ) from err
    n = system.shape[0]
    _METER.add(n**3 + n * n * (rhs.shape[1] if rhs.ndim == 2 else 1))
    return np.linalg.solve(system, rhs)


@dataclass
class LowRankState:
    """Rank-r factorization g ~= X S V^t of the microscopic field."""

    X: np.ndarray    # (n_interfaces, r), orthonormal columns
    S: np.ndarray    # (r, r)
    V: np.ndarray    # (n_moments, r), orthonormal columns

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.S = np.asarray(self.S, dtype=float)
        self.V = np.asarray(self.V, dtype=float)
        r = self.S.shape[0]
        if self.S.shape != (r, r) or self.X.shape[1] != r or self.V.shape[1] != r:
            raise ValueError(
                f"inconsistent factor shapes X{self.X.shape} S{self.S.shape} V{self.V.shape}"
            )
        for name, m in (("X", self.X), ("S", self.S), ("V", self.V)):
            if not np.all(np.isfinite(m)):
                raise BlowUpError(f"non-finite entries in factor {name}", operator="LowRankState")

    @property
    def rank(self) -> int:
        return self.S.shape[0]


class OrthoResult(NamedTuple):
    q: np.ndarray
    r: np.ndarray
    n_deficient: int


def _complete_columns(q: np.ndarray, deficient: np.ndarray) -> np.ndarray:
    """Replace the flagged columns by canonical basis vectors orthogonalized
    against the remaining ones, in deterministic order."""
    q = q.copy()
    q[:, deficient] = 0.0
    m = q.shape[0]
    e = 0
    for i in deficient:
        while True:
            if e >= m:
                raise NumericalError("cannot complete a rank-deficient basis")
            v = np.zeros(m)
            v[e] = 1.0
            e += 1
            for _ in range(2):  # twice-is-enough re-orthogonalization
                v -= q @ (q.T @ v)
            nrm = float(np.linalg.norm(v))
            if nrm > 0.5:
                q[:, i] = v / nrm
                break
    return q


def orthonormalize(b: np.ndarray) -> OrthoResult:
    """QR factorization with nonnegative R diagonal.

    For full-column-rank input, b = q r to machine precision.  Deficient
    columns (detected from the R diagonal) are replaced by deterministically
    completed orthonormal vectors and counted in n_deficient; callers that
    only need the basis can ignore r.
    """
    b = np.asarray(b, dtype=float)
    m, r = b.shape
    _METER.add(2 * m * r * r)
    q, rmat = np.linalg.qr(b)
    signs = np.where(np.diag(rmat) < 0.0, -1.0, 1.0)
    q = q * signs[None, :]
    rmat = rmat * signs[:, None]

    diag = np.abs(np.diag(rmat))
    tol = max(m, r) * np.finfo(float).eps * float(diag.max(initial=0.0))
    deficient = np.flatnonzero(diag <= tol)
    if deficient.size:
        q = _complete_columns(q, deficient)
    return OrthoResult(q, rmat, int(deficient.size))


def init_lowrank(g0: np.ndarray, rank: int) -> LowRankState:
    """Truncated SVD factorization of an interface-by-moment field.

    The all-zero field (isotropic initial data) has no preferred subspace;
    it falls back to the first `rank` discrete cosine modes in space and the
    first `rank` canonical moment directions, with zero coefficients.
    """
    g0 = np.asarray(g0, dtype=float)
    if g0.ndim != 2:
        raise ValueError(f"initial field must be 2-D, got ndim={g0.ndim}")
    n_if, n_mom = g0.shape
    if not 1 <= rank <= min(n_if, n_mom):
        raise ValueError(f"rank {rank} not in [1, {min(n_if, n_mom)}]")

    if not g0.any():
        j = np.arange(n_if) + 0.5
        modes = np.cos(np.pi * np.outer(j / n_if, np.arange(rank)))  # (n_if, rank)
        x = orthonormalize(modes).q
        v = np.eye(n_mom, rank)
        return LowRankState(X=x, S=np.zeros((rank, rank)), V=v)

    u, s, vt = np.linalg.svd(g0, full_matrices=False)
    return LowRankState(X=u[:, :rank], S=np.diag(s[:rank]), V=vt[:rank].T)


def reconstruct(lr: LowRankState) -> np.ndarray:
    """Dense field X S V^t."""
    return lr.X @ lr.S @ lr.V.T


def lowrank_energy(rho: np.ndarray, lr: LowRankState, eps: float, grid: Grid) -> float:
    """Discrete energy of (rho, X S V^t); the field norm is |S|_F by
    orthonormality of the bases."""
    rho_part = float(rho @ rho) * grid.dx
    g_part = float(np.sum(lr.S * lr.S)) * grid.dx
    return rho_part + eps * eps * g_part


def k_step(
    lr: LowRankState,
    rho: np.ndarray,
    ops: FluxOperators,
    grid: Grid,
    sigma: SigmaField,
    eps: float,
    dt: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Advance K = X S with frozen moment basis; return the refreshed spatial
    basis and its projection onto the old one."""
    k = _mm(lr.X, lr.S)
    gram_p = _mm(lr.V.T, _mm(ops.A_plus, lr.V))
    gram_m = _mm(lr.V.T, _mm(ops.A_minus, lr.V))
    stream = _mm(d_minus(k, grid), gram_p) + _mm(d_plus(k, grid), gram_m)
    a_v = ops.a @ lr.V                       # (r,), single nonzero in a
    grad = density_gradient(rho, grid)
    rhs = k - (dt / eps) * stream - (dt / eps**2) * np.outer(grad, a_v)
    k_new = rhs / (1.0 + dt * sigma.values[:, None] / eps**2)
    x_new = orthonormalize(k_new).q
    m_proj = _mm(x_new.T, lr.X)
    return x_new, m_proj


def l_step(
    lr: LowRankState,
    rho: np.ndarray,
    ops: FluxOperators,
    grid: Grid,
    sigma: SigmaField,
    eps: float,
    dt: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Advance L = V S^t with frozen spatial basis; return the refreshed
    moment basis and its projection onto the old one."""
    ell = _mm(lr.V, lr.S.T)
    cm = _mm(d_minus(lr.X, grid).T, lr.X)    # (r, r)
    cp = _mm(d_plus(lr.X, grid).T, lr.X)
    stream = _mm(_mm(ops.A_plus, ell), cm) + _mm(_mm(ops.A_minus, ell), cp)
    grad = density_gradient(rho, grid)
    src = np.outer(ops.a, _mm(lr.X.T, grad))
    rhs = ell - (dt / eps) * stream - (dt / eps**2) * src
    w_gram = _mm(lr.X.T, sigma.values[:, None] * lr.X)
    system = np.eye(lr.rank) + (dt / eps**2) * w_gram
    ell_new = _solve_spd(system, rhs.T).T    # right-multiplication by the inverse
    v_new = orthonormalize(ell_new).q
    n_proj = _mm(v_new.T, lr.V)
    return v_new, n_proj


def s_step(
    lr: LowRankState,
    x_new: np.ndarray,
    v_new: np.ndarray,
    m_proj: np.ndarray,
    n_proj: np.ndarray,
    rho: np.ndarray,
    ops: FluxOperators,
    grid: Grid,
    sigma: SigmaField,
    eps: float,
    dt: float,
) -> np.ndarray:
    """Galerkin update of the coefficients in the refreshed bases."""
    s_tilde = _mm(_mm(m_proj, lr.S), n_proj.T)
    dhat_m = _mm(x_new.T, d_minus(x_new, grid))
    dhat_p = _mm(x_new.T, d_plus(x_new, grid))
    gram_p = _mm(v_new.T, _mm(ops.A_plus, v_new))
    gram_m = _mm(v_new.T, _mm(ops.A_minus, v_new))
    stream = _mm(_mm(dhat_m, s_tilde), gram_p) + _mm(_mm(dhat_p, s_tilde), gram_m)
    grad = density_gradient(rho, grid)
    src = np.outer(_mm(x_new.T, grad), ops.a @ v_new)
    rhs = s_tilde - (dt / eps) * stream - (dt / eps**2) * src
    w_gram = _mm(x_new.T, sigma.values[:, None] * x_new)
    system = np.eye(x_new.shape[1]) + (dt / eps**2) * w_gram
    return _solve_spd(system, rhs)


def dlra_step(
    lr: LowRankState,
    rho: np.ndarray,
    ops: FluxOperators,
    grid: Grid,
    sigma: SigmaField,
    eps: float,
    dt: float,
) -> tuple[LowRankState, np.ndarray]:
    """One full basis-update & Galerkin step plus the density update.

    The K and L substeps read only the previous state and are independent of
    each other; the S substep joins their results.  The density is advanced
    with the first moment of the reconstruction, rho frozen over the step.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")

    x_new, m_proj = k_step(lr, rho, ops, grid, sigma, eps, dt)
    v_new, n_proj = l_step(lr, rho, ops, grid, sigma, eps, dt)
    s_new = s_step(lr, x_new, v_new, m_proj, n_proj, rho, ops, grid, sigma, eps, dt)

    g1 = _mm(x_new, s_new @ v_new[0, :])      # first-moment column of X S V^t
    rho_new = rho - dt * ops.a0 * flux_divergence(g1, grid)
    if not np.all(np.isfinite(rho_new)):
        raise BlowUpError("non-finite density after step", operator="dlra_step")
    return LowRankState(X=x_new, S=s_new, V=v_new), rho_new


def run_dlra(config) -> Trajectory:
    """Run the fixed-rank solver as described by a SolverConfig."""
    from .fullrank import cfl_dt

    grid = config.make_grid()
    sigma = config.make_sigma(grid)
    ops = config.make_operators()
    state0 = config.initial_state(grid)
    lr = init_lowrank(state0.g, config.rank)
    report = cfl_dt(ops.quad, config.moments, config.eps, grid.dx, sigma.sigma0, config.cfl_safety)

    def step(pair, h):
        lr_, rho_ = pair
        return dlra_step(lr_, rho_, ops, grid, sigma, config.eps, h)

    (lr, rho), traj = run_loop(
        (lr, state0.rho),
        step=step,
        energy_of=lambda p: lowrank_energy(p[1], p[0], config.eps, grid),
        rho_of=lambda p: p[1],
        dt=report.dt,
        t_end=config.t_end,
        profile_times=config.profile_times,
        solver="dlra",
        cfl=report,
    )
    traj.final_lowrank = lr
    return traj
