"""Quadrature, Legendre evaluation, and flux-operator construction tests."""

import numpy as np
import pytest

from slabrt import (
    build_operators,
    eval_legendre_orthonormal,
    gauss_legendre,
    recurrence_coeff,
)


class TestGaussLegendre:
    def test_order_one_is_midpoint_rule(self):
        q = gauss_legendre(1)
        assert q.nodes == pytest.approx([0.0], abs=0)
        assert q.weights == pytest.approx([2.0], abs=0)

    def test_order_two_classical_rule(self):
        q = gauss_legendre(2)
        assert q.nodes == pytest.approx([-1 / np.sqrt(3), 1 / np.sqrt(3)], abs=1e-15)
        assert q.weights == pytest.approx([1.0, 1.0], abs=1e-15)

    def test_zero_order_rejected(self):
        with pytest.raises(ValueError):
            gauss_legendre(0)

    @pytest.mark.parametrize("order", [1, 2, 3, 5, 10, 47, 101, 200])
    def test_weights_sum_to_two(self, order):
        q = gauss_legendre(order)
        assert abs(q.weights.sum() - 2.0) < 1e-12
        assert np.all(q.weights > 0)

    @pytest.mark.parametrize("order", [2, 3, 10, 101])
    def test_nodes_ascending_and_antisymmetric(self, order):
        q = gauss_legendre(order)
        assert np.all(np.diff(q.nodes) > 0)
        # exact antisymmetry by construction, including an exact middle zero
        assert np.array_equal(q.nodes, -q.nodes[::-1])
        assert np.array_equal(q.weights, q.weights[::-1])
        if order % 2 == 1:
            assert q.nodes[order // 2] == 0.0

    @pytest.mark.parametrize("order", [1, 2, 3, 7, 31, 101])
    def test_moment_exactness(self, order):
        # oracle: int_{-1}^{1} mu^m dmu = 2/(m+1) for even m, 0 for odd m
        q = gauss_legendre(order)
        for m in range(2 * order):
            exact = 2.0 / (m + 1) if m % 2 == 0 else 0.0
            assert abs(np.sum(q.weights * q.nodes**m) - exact) < 1e-12, f"m={m}"

    @pytest.mark.parametrize("order", [5, 64, 101])
    def test_matches_library_rule(self, order):
        q = gauss_legendre(order)
        nodes_ref, weights_ref = np.polynomial.legendre.leggauss(order)
        assert np.max(np.abs(q.nodes - nodes_ref)) < 1e-14
        assert np.max(np.abs(q.weights - weights_ref)) < 1e-13

    def test_deterministic(self):
        a, b = gauss_legendre(33), gauss_legendre(33)
        assert np.array_equal(a.nodes, b.nodes)
        assert np.array_equal(a.weights, b.weights)


class TestLegendreEvaluation:
    def test_degree_zero_is_normalized_constant(self):
        assert eval_legendre_orthonormal(0, 0.37) == pytest.approx(1 / np.sqrt(2), abs=1e-15)

    def test_degree_one(self):
        assert eval_legendre_orthonormal(1, 0.5) == pytest.approx(np.sqrt(1.5) * 0.5, abs=1e-15)

    def test_orthogonality_under_quadrature(self):
        q = gauss_legendre(10)
        s = sum(
            w * eval_legendre_orthonormal(5, mu) * eval_legendre_orthonormal(3, mu)
            for mu, w in zip(q.nodes, q.weights)
        )
        assert abs(s) < 1e-12

    def test_normalization_under_quadrature(self):
        q = gauss_legendre(12)
        for l in (0, 1, 4, 9):
            s = sum(w * eval_legendre_orthonormal(l, mu) ** 2 for mu, w in zip(q.nodes, q.weights))
            assert abs(s - 1.0) < 1e-12

    def test_domain_and_degree_errors(self):
        with pytest.raises(ValueError):
            eval_legendre_orthonormal(3, 1.0001)
        with pytest.raises(ValueError):
            eval_legendre_orthonormal(-1, 0.0)


class TestRecurrenceCoeff:
    def test_values(self):
        assert recurrence_coeff(0) == pytest.approx(1 / np.sqrt(3), abs=1e-15)
        assert recurrence_coeff(1) == pytest.approx(2 / np.sqrt(15), abs=1e-15)

    def test_negative_degree_rejected(self):
        with pytest.raises(ValueError):
            recurrence_coeff(-1)

    @pytest.mark.parametrize("l", [1, 2, 5, 17, 40])
    def test_defining_identity(self, l):
        # mu p_l = a_{l-1} p_{l-1} + a_l p_{l+1} pointwise
        rng = np.random.default_rng(7)
        for mu in rng.uniform(-1, 1, size=20):
            lhs = mu * eval_legendre_orthonormal(l, mu)
            rhs = recurrence_coeff(l - 1) * eval_legendre_orthonormal(l - 1, mu) \
                + recurrence_coeff(l) * eval_legendre_orthonormal(l + 1, mu)
            assert abs(lhs - rhs) < 1e-12


def analytic_tridiagonal(n):
    a = np.zeros((n, n))
    for l in range(1, n):
        a[l - 1, l] = a[l, l - 1] = recurrence_coeff(l)
    return a


class TestFluxOperators:
    def test_single_moment(self):
        ops = build_operators(1)
        assert ops.A.shape == (1, 1)
        assert abs(ops.A[0, 0]) < 1e-15
        assert ops.abs_A[0, 0] > 0.1

    def test_two_moment_offdiagonal(self):
        ops = build_operators(2)
        assert ops.A[0, 1] == pytest.approx(2 / np.sqrt(15), abs=1e-14)

    def test_invalid_moment_count(self):
        with pytest.raises(ValueError):
            build_operators(0)

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 100])
    def test_quadrature_equals_analytic(self, n):
        ops = build_operators(n)
        assert np.max(np.abs(ops.A - analytic_tridiagonal(n))) < 1e-12

    def test_quadrature_equals_analytic_all_orders(self):
        worst = max(
            np.max(np.abs(build_operators(n).A - analytic_tridiagonal(n)))
            for n in range(1, 101)
        )
        assert worst < 1e-12

    @pytest.mark.parametrize("n", [1, 2, 5, 20])
    def test_factorization_identities(self, n):
        ops = build_operators(n)
        mu = ops.quad.nodes
        assert np.max(np.abs(ops.A - (ops.T * mu[None, :]) @ ops.T.T)) < 1e-12
        assert np.array_equal(ops.A, ops.A_plus + ops.A_minus)
        assert np.array_equal(ops.abs_A, ops.A_plus - ops.A_minus)
        assert np.max(np.abs(ops.abs_A - ops.abs_A.T)) == 0.0

    @pytest.mark.parametrize("n", [1, 2, 5, 20, 100])
    def test_full_transform_is_orthogonal(self, n):
        ops = build_operators(n)
        eye = np.eye(n + 1)
        assert np.max(np.abs(ops.Tf @ ops.Tf.T - eye)) < 1e-12
        assert np.max(np.abs(ops.Tf.T @ ops.Tf - eye)) < 1e-12

    @pytest.mark.parametrize("n", [1, 2, 5, 20])
    def test_stabilization_positive_semidefinite(self, n):
        ops = build_operators(n)
        rng = np.random.default_rng(n)
        v = rng.standard_normal((100, n))
        quad_forms = np.einsum("ki,ij,kj->k", v, ops.abs_A, v)
        norms = np.einsum("ki,ki->k", v, v)
        assert np.all(quad_forms >= -1e-12 * norms)

    def test_stabilization_differs_from_roe_matrix(self):
        # Roe stabilization from the eigendecomposition of A; the node-space
        # construction must NOT coincide with it
        for n, min_gap in ((7, 1e-8), (1, 0.5)):
            ops = build_operators(n)
            lam, vecs = np.linalg.eigh(ops.A)
            roe = (vecs * np.abs(lam)[None, :]) @ vecs.T
            assert np.max(np.abs(ops.abs_A - roe)) > min_gap

    def test_coupling_vectors(self):
        ops = build_operators(6)
        assert ops.a0 == pytest.approx(1 / np.sqrt(3), abs=0)
        assert np.array_equal(ops.a, np.array([ops.a0, 0, 0, 0, 0, 0.0]))
        assert np.array_equal(ops.af, np.array([0, ops.a0, 0, 0, 0, 0, 0.0]))


class TestMomentNodeIdentities:
    """Quadratic-form identities linking the reduced operators (A, |A|, a)
    to the diagonal node matrices through the full transform.

    For h = (0, g) and hhat = Tf^t h:
        g^t (A^2 + a a^t) g = hhat^t M^2 hhat
        g^t |A| g           = hhat^t |M| hhat
        g^t a a^t g         = (af^t Tf hhat)^2
    The A^2 identity needs the rank-one a a^t term: the first component of
    the embedded flux Af h is a^t g, whose square is exactly the gap.
    """

    @pytest.mark.parametrize("n", [1, 2, 5, 20])
    def test_identities(self, n):
        ops = build_operators(n)
        mu = ops.quad.nodes
        rng = np.random.default_rng(100 + n)
        for _ in range(250):
            g = rng.standard_normal(n)
            h = np.concatenate([[0.0], g])
            hhat = ops.Tf.T @ h

            lhs = g @ (ops.A @ (ops.A @ g)) + (ops.a @ g) ** 2
            rhs = hhat @ (mu**2 * hhat)
            assert abs(lhs - rhs) <= 1e-10 * max(abs(rhs), 1e-30)

            lhs = g @ (ops.abs_A @ g)
            rhs = hhat @ (np.abs(mu) * hhat)
            assert abs(lhs - rhs) <= 1e-10 * max(abs(rhs), 1e-30)

            lhs = (ops.a @ g) ** 2
            rhs = ((ops.Tf.T @ ops.af) @ hhat) ** 2
            assert abs(lhs - rhs) <= 1e-10 * max(abs(rhs), abs(lhs), 1e-30)

    @pytest.mark.parametrize("n", [1, 2, 5, 20, 100])
    def test_transformed_coupling_vector(self, n):
        # Tf^t af has entries sqrt(w_k/2) mu_k
        ops = build_operators(n)
        expected = np.sqrt(ops.quad.weights / 2.0) * ops.quad.nodes
        assert np.max(np.abs(ops.Tf.T @ ops.af - expected)) < 1e-12
