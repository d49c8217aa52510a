import itertools

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from apps.qmacro.BLL.Core.collective_ops import (
    collective_op, collective_op_phase_space, collective_ops, commuting_sets, matrix_elements,
    p_symbol_O, p_symbol_O_table, single_particle_op,
)
from apps.qmacro.BLL.Core.fiducial import FiducialState, coherent_state
from apps.qmacro.BLL.Core.phase_space import p_table
from apps.qmacro.BLL.Core.qudit_ops import embed_single
from apps.qmacro.BLL.Core.sym_subspace import projector_sym
from apps.qmacro.BLL.Core.zd_strings import DString, enumerate_strings, weight_labels
from backend.exceptions import DomainError

SIGMA_Z = np.diag([1.0, -1.0])
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]])


class SingleParticleTests(SimpleTestCase):
    def test_qubit_pauli_correspondence(self):
        xi = FiducialState.builtin(2)
        for label, sigma in (((0, 1), SIGMA_Z), ((1, 0), SIGMA_X), ((1, 1), SIGMA_Y)):
            assert_allclose(single_particle_op(*label, xi, 2).matrix, sigma / np.sqrt(3), atol=1e-12)

    def test_qutrit_z_operators(self):
        xi = FiducialState.builtin(3)
        assert_allclose(single_particle_op(0, 1, xi, 3).matrix, np.diag([0, 0.5, -0.5]), atol=1e-12)
        assert_allclose(single_particle_op(0, 2, xi, 3).matrix, np.diag([0.5, 0, -0.5]), atol=1e-12)

    def test_trace_normalization(self):
        for d in (2, 3):
            xi = FiducialState.builtin(d)
            for label in weight_labels(d):
                o = single_particle_op(*label, xi, d).matrix
                assert_allclose(o, o.conj().T, atol=1e-12)
                self.assertAlmostEqual(abs(np.trace(o)), 0.0, places=12)
                self.assertAlmostEqual(np.trace(o @ o).real, d / (3 * (d - 1)), places=10)

    def test_closed_form_matrix_elements(self):
        for d in (2, 3):
            xi = FiducialState.builtin(d)
            for label in weight_labels(d):
                assert_allclose(matrix_elements(*label, xi, d), single_particle_op(*label, xi, d).matrix, atol=1e-10)

    def test_raw_coefficients_accepted(self):
        c = FiducialState.builtin(3).single(0)
        assert_allclose(single_particle_op(1, 2, c, 3).matrix,
                        single_particle_op(1, 2, FiducialState.builtin(3), 3).matrix, atol=1e-12)

    def test_invalid_labels(self):
        xi = FiducialState.builtin(3)
        with self.assertRaises(DomainError):
            single_particle_op(0, 0, xi, 3)
        with self.assertRaises(DomainError):
            single_particle_op(3, 1, xi, 3)


class CollectiveTests(SimpleTestCase):
    def test_qubit_collective_is_spin(self):
        N = 3
        xi = FiducialState.builtin(2, N)
        expected = sum(embed_single(SIGMA_Z, i, 2, N) for i in range(N))
        assert_allclose(collective_op(0, 1, xi, 2, N).matrix, expected / np.sqrt(3), atol=1e-12)

    def test_commuting_sets(self):
        d, N = 3, 2
        xi = FiducialState.builtin(d, N)
        ops = collective_ops(xi, d, N)
        sets = commuting_sets(d)
        self.assertEqual(len(sets), d + 1)
        self.assertEqual(sorted(itertools.chain.from_iterable(sets)), sorted(weight_labels(d)))
        for group in sets:
            for a, b in itertools.combinations(group, 2):
                assert_allclose(ops[a].matrix @ ops[b].matrix, ops[b].matrix @ ops[a].matrix, atol=1e-10)

    def test_trace_orthogonality(self):
        d, N = 3, 2
        ops = collective_ops(FiducialState.builtin(d, N), d, N)
        for (k, l), (kp, lp) in itertools.combinations(weight_labels(d), 2):
            if (kp * l - k * lp) % d:
                self.assertAlmostEqual(abs(np.trace(ops[(k, l)].matrix @ ops[(kp, lp)].matrix)), 0.0, places=10)

    def test_phase_space_form(self):
        for d, N in ((2, 2), (3, 2)):
            xi = FiducialState.builtin(d, N)
            for label in weight_labels(d):
                assert_allclose(collective_op_phase_space(*label, xi, d, N).matrix,
                                collective_op(*label, xi, d, N).matrix, atol=1e-10)

    def test_p_symbol(self):
        d, N = 3, 2
        xi = FiducialState.builtin(d, N)
        alpha, beta = DString((1, 2), 3), DString((0, 1), 3)
        # h(alpha + beta) = 1 + 0 = 1
        self.assertAlmostEqual(p_symbol_O(1, 1, alpha, beta, d, N), (2 - 1.0) / 9)
        dense = p_table(collective_op(1, 1, xi, d, N), xi)
        table = p_symbol_O_table(1, 1, d, N)
        assert_allclose(table, dense.real, atol=1e-10)
        for a in enumerate_strings(d, N):
            for b in enumerate_strings(d, N):
                self.assertAlmostEqual(table[a.index, b.index], p_symbol_O(1, 1, a, b, d, N))


class CoherentExpectationTests(SimpleTestCase):
    def _expectations(self, d, N, project=False):
        xi = FiducialState.builtin(d, N)
        ops = collective_ops(xi, d, N)
        sym = projector_sym(d, N).matrix
        for alpha in enumerate_strings(d, N):
            for beta in enumerate_strings(d, N):
                psi = coherent_state(xi, alpha, beta).amplitudes
                if project:
                    psi = sym @ psi
                for (k, l), op in ops.items():
                    yield np.vdot(psi, op.matrix @ psi), d ** N / (d + 1) * p_symbol_O(k, l, alpha, beta, d, N)

    def test_coherent_states(self):
        for d, N in ((2, 3), (3, 2)):
            for measured, expected in self._expectations(d, N):
                self.assertAlmostEqual(measured, expected, places=10)

    def test_projected_two_qubits(self):
        for measured, expected in self._expectations(2, 2, project=True):
            self.assertAlmostEqual(measured, expected, places=10)
