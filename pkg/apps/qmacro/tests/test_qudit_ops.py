import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from apps.qmacro.BLL.Core.qudit_ops import (
    DenseOperator, StateVector, all_permutations, basis_state, ghz_state, kron_all, monomial, omega, pauli_single,
    permutation_matrix, permute_state, random_density_matrix,
)
from apps.qmacro.BLL.Core.zd_strings import DString
from backend.exceptions import DimensionError, DomainError
from utils.enums import PauliKind


class PauliTests(SimpleTestCase):
    def test_qubit_paulis(self):
        assert_allclose(pauli_single(PauliKind.Z, 2).matrix, np.diag([1, -1]), atol=1e-12)
        assert_allclose(pauli_single(PauliKind.X, 2).matrix, [[0, 1], [1, 0]])

    def test_qutrit_z(self):
        w = omega(3)
        assert_allclose(pauli_single(PauliKind.Z, 3).matrix, np.diag([1, w, w * w]), atol=1e-12)

    def test_commutation_zx_equals_omega_xz(self):
        for d in (2, 3, 5):
            Z = pauli_single(PauliKind.Z, d).matrix
            X = pauli_single(PauliKind.X, d).matrix
            assert_allclose(Z @ X, omega(d) * X @ Z, atol=1e-12)


class MonomialTests(SimpleTestCase):
    def test_zero_labels_give_identity(self):
        op = monomial(DString.zero(3, 2), DString.zero(3, 2))
        assert_allclose(op.matrix, np.eye(9))

    def test_qubit_zx(self):
        op = monomial(DString((1,), 2), DString((1,), 2))
        assert_allclose(op.matrix, [[0, 1], [-1, 0]], atol=1e-12)

    def test_tensor_factorization(self):
        Z = pauli_single(PauliKind.Z, 3).matrix
        X = pauli_single(PauliKind.X, 3).matrix
        op = monomial(DString((1, 0), 3), DString((0, 1), 3))
        assert_allclose(op.matrix, np.kron(Z, X), atol=1e-12)

    def test_mismatched_labels_raise(self):
        with self.assertRaises(DimensionError):
            monomial(DString((1,), 3), DString((0, 1), 3))


class StateTests(SimpleTestCase):
    def test_ghz(self):
        psi = ghz_state(2, 2)
        expected = np.zeros(4)
        expected[[0, 3]] = 1 / np.sqrt(2)
        assert_allclose(psi.amplitudes, expected, atol=1e-12)
        self.assertAlmostEqual(psi.norm(), 1.0)
        assert_allclose(ghz_state(3, 1).amplitudes, np.ones(3) / np.sqrt(3), atol=1e-12)

    def test_unnormalized_state_raises(self):
        with self.assertRaises(DomainError):
            StateVector(np.array([1.0, 1.0]), 2, 1)

    def test_operator_shape_is_checked(self):
        with self.assertRaises(DimensionError):
            DenseOperator(np.eye(3), 2, 2)

    def test_random_density_matrix(self):
        rho = random_density_matrix(3, 2, np.random.default_rng(1))
        self.assertAlmostEqual(rho.trace().real, 1.0)
        self.assertLess(rho.hermitian_residual(), 1e-12)
        self.assertGreater(np.linalg.eigvalsh(rho.matrix).min(), -1e-12)


class PermutationTests(SimpleTestCase):
    def test_identity_permutation(self):
        rho = random_density_matrix(2, 3, np.random.default_rng(2))
        assert_allclose(permute_state(rho, (0, 1, 2)).matrix, rho.matrix)

    def test_swap_of_product_state(self):
        rho = basis_state((0, 1), 2).projector()
        swapped = permute_state(rho, (1, 0))
        assert_allclose(swapped.matrix, basis_state((1, 0), 2).projector().matrix)

    def test_ghz_is_invariant(self):
        rho = ghz_state(3, 3).projector()
        for perm in all_permutations(3):
            assert_allclose(permute_state(rho, perm).matrix, rho.matrix, atol=1e-12)

    def test_matrix_agrees_with_index_relabeling(self):
        rho = random_density_matrix(2, 3, np.random.default_rng(3))
        perm = (2, 0, 1)
        P = permutation_matrix(perm, 2, 3)
        assert_allclose(permute_state(rho, perm).matrix, P @ rho.matrix @ P.T, atol=1e-12)

    def test_invalid_permutation(self):
        rho = random_density_matrix(2, 2, np.random.default_rng(4))
        with self.assertRaises(DomainError):
            permute_state(rho, (0, 0))

    def test_kron_all(self):
        a, b = np.eye(2), np.array([[0, 1], [1, 0]])
        assert_allclose(kron_all([a, b]), np.kron(a, b))
