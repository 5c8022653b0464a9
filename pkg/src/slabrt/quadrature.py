"""Gauss-Legendre quadrature, orthonormal Legendre polynomials, and the modal
flux operators of the moment system.

The flux matrix of the moment hierarchy is factorized through the quadrature
rule as A = T M T^t with M = diag(mu_k), which yields the stabilization
matrix |A| = T |M| T^t and the splitting A = A_plus + A_minus.  This
node-space factorization is deliberately *not* the Roe matrix obtained from
the eigendecomposition of A; the two disagree already for small moment
counts (see tests).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuadratureSet",
    "FluxOperators",
    "gauss_legendre",
    "eval_legendre_orthonormal",
    "legendre_table",
    "recurrence_coeff",
    "build_operators",
]

_NEWTON_TOL = 1e-15
_NEWTON_MAX_ITER = 100


@dataclass(frozen=True)
class QuadratureSet:
    """A Gauss-Legendre rule on [-1, 1].

    Nodes are strictly increasing and exactly antisymmetric about 0 (the
    middle node of an odd-order rule is exactly 0.0); weights are positive,
    symmetric, and sum to 2.  Polynomials of degree <= 2*order - 1 are
    integrated exactly.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class FluxOperators:
    """Flux and stabilization matrices of the micro system with N moments.

    A is the symmetric tridiagonal coupling matrix of the moments of degree
    1..N; abs_A = T |M| T^t is the upwind stabilization; A_plus/A_minus split
    A into its positive/negative node-space parts.  T maps moment to node
    space for degrees 1..N, Tf for degrees 0..N (Tf is orthogonal).  The
    vector a couples the microscopic moments to the density gradient, af is
    its embedding into the full (N+1)-moment hierarchy.
    """

    n_moments: int
    quad: QuadratureSet
    A: np.ndarray          # (N, N) tridiagonal, symmetric
    abs_A: np.ndarray      # (N, N) symmetric positive semidefinite
    A_plus: np.ndarray     # (N, N)
    A_minus: np.ndarray    # (N, N)
    a: np.ndarray          # (N,)  = (a0, 0, ..., 0)
    T: np.ndarray          # (N, N+1)
    Tf: np.ndarray         # (N+1, N+1) orthogonal
    af: np.ndarray         # (N+1,) = (0, a0, 0, ..., 0)
    a0: float              # 1/sqrt(3)


def _legendre_and_derivative(order: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Classical P_order(x) and P'_order(x) via the three-term recurrence."""
    p_prev = np.ones_like(x)
    p = x.copy()
    if order == 1:
        dp = np.ones_like(x)
        return p, dp
    for l in range(2, order + 1):
        p_prev, p = p, ((2 * l - 1) * x * p - (l - 1) * p_prev) / l
    dp = order * (p_prev - x * p) / (1.0 - x * x)
    return p, dp


def gauss_legendre(order: int) -> QuadratureSet:
    """Build the Gauss-Legendre rule with `order` nodes on [-1, 1].

    Nodes are the Legendre roots, found by Newton iteration from the
    Chebyshev-type asymptotic initial guess; weights follow from the
    derivative values.  Accurate to machine precision for order <= 200.
    """
    if order < 1:
        raise ValueError(f"quadrature order must be >= 1, got {order}")
    if order == 1:
        return QuadratureSet(1, np.zeros(1), np.full(1, 2.0))

    k = np.arange(1, order + 1)
    x = np.cos(np.pi * (4 * k - 1) / (4 * order + 2))
    for _ in range(_NEWTON_MAX_ITER):
        p, dp = _legendre_and_derivative(order, x)
        dx = p / dp
        x -= dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    _, dp = _legendre_and_derivative(order, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)

    idx = np.argsort(x)
    x, w = x[idx], w[idx]
    # enforce exact antisymmetry; the middle node of an odd rule becomes 0.0
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return QuadratureSet(order, x, w)


def legendre_table(l_max: int, mu: np.ndarray) -> np.ndarray:
    """Orthonormal Legendre values p_l(mu) for l = 0..l_max, shape (l_max+1, len(mu)).

    Uses the normalized recurrence mu*p_l = a_{l-1} p_{l-1} + a_l p_{l+1},
    which stays bounded at high degree.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    out = np.empty((l_max + 1, mu.size))
    out[0] = 1.0 / np.sqrt(2.0)
    if l_max >= 1:
        out[1] = np.sqrt(1.5) * mu
    for l in range(1, l_max):
        out[l + 1] = (mu * out[l] - recurrence_coeff(l - 1) * out[l - 1]) / recurrence_coeff(l)
    return out


def eval_legendre_orthonormal(l: int, mu: float) -> float:
    """Evaluate the orthonormal Legendre polynomial p_l at mu in [-1, 1]."""
    if l < 0:
        raise ValueError(f"degree must be >= 0, got {l}")
    if abs(mu) > 1.0:
        raise ValueError(f"mu must lie in [-1, 1], got {mu}")
    return float(legendre_table(l, np.array([mu]))[l, 0])


def recurrence_coeff(l: int) -> float:
    """Coefficient a_l = (l+1)/sqrt((2l+1)(2l+3)) of the normalized recurrence."""
    if l < 0:
        raise ValueError(f"degree must be >= 0, got {l}")
    return (l + 1) / np.sqrt((2 * l + 1) * (2 * l + 3))


def build_operators(n_moments: int) -> FluxOperators:
    """Assemble the flux operators for a micro system with `n_moments` moments.

    The quadrature order is fixed at n_moments + 1, which makes Tf square and
    orthogonal and T^t T = I - T0 T0^t; the stabilization identities rely on
    exactly that node count.  abs_A, A_plus and -A_minus are assembled as
    Gram matrices B B^t, so their symmetry and semidefiniteness are exact in
    floating point.
    """
    if n_moments < 1:
        raise ValueError(f"moment count must be >= 1, got {n_moments}")
    quad = gauss_legendre(n_moments + 1)
    mu, w = quad.nodes, quad.weights

    table = legendre_table(n_moments, mu)            # (N+1, N+1)
    Tf = np.sqrt(w)[None, :] * table
    T = Tf[1:, :]

    b_plus = T * np.sqrt(np.maximum(mu, 0.0))[None, :]
    b_minus = T * np.sqrt(np.maximum(-mu, 0.0))[None, :]
    A_plus = b_plus @ b_plus.T
    neg_part = b_minus @ b_minus.T
    A_minus = -neg_part
    A = A_plus + A_minus
    abs_A = A_plus + neg_part

    a0 = recurrence_coeff(0)
    a = np.zeros(n_moments)
    a[0] = a0
    af = np.zeros(n_moments + 1)
    af[1] = a0

    return FluxOperators(
        n_moments=n_moments,
        quad=quad,
        A=A,
        abs_A=abs_A,
        A_plus=A_plus,
        A_minus=A_minus,
        a=a,
        T=T,
        Tf=Tf,
        af=af,
        a0=float(a0),
    )
