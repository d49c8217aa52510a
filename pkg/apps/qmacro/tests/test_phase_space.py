import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from apps.qmacro.BLL.Core.fiducial import FiducialState
from apps.qmacro.BLL.Core.macro_space import ghz_q_symbol
from apps.qmacro.BLL.Core.phase_space import (
    average_from_symbols, collective_monomial, kernel, kernel_stacks, p_symbol, p_symbol_collective_monomial,
    p_table, q_symbol, q_table, reconstruct_from_symbols,
)
from apps.qmacro.BLL.Core.qudit_ops import DenseOperator, ghz_state, random_density_matrix
from apps.qmacro.BLL.Core.zd_strings import DString, enumerate_strings
from backend.exceptions import MissingPointsError, SingularFiducialError
from utils.enums import KernelSign, SymbolKind


def random_hermitian(d, N, rng):
    a = rng.standard_normal((d ** N, d ** N)) + 1j * rng.standard_normal((d ** N, d ** N))
    return DenseOperator(a + a.conj().T, d, N)


class KernelTests(SimpleTestCase):
    def test_traces(self):
        for d, N in ((2, 1), (2, 2), (3, 1)):
            xi = FiducialState.builtin(d, N)
            for alpha in enumerate_strings(d, N):
                beta = DString(tuple((x + 1) % d for x in alpha.digits), d)
                self.assertAlmostEqual(kernel(KernelSign.MINUS, xi, alpha, beta).trace(), 1.0, places=12)
                self.assertAlmostEqual(kernel(KernelSign.PLUS, xi, alpha, beta).trace(), d ** -N, places=12)

    def test_completeness(self):
        for d, N in ((2, 2), (3, 1)):
            xi = FiducialState.builtin(d, N)
            plus = sum(kernel(KernelSign.PLUS, xi, a, b).matrix
                       for a in enumerate_strings(d, N) for b in enumerate_strings(d, N))
            minus = sum(kernel(KernelSign.MINUS, xi, a, b).matrix
                        for a in enumerate_strings(d, N) for b in enumerate_strings(d, N))
            assert_allclose(plus, np.eye(d ** N), atol=1e-10)
            assert_allclose(minus, d ** N * np.eye(d ** N), atol=1e-10)

    def test_bi_orthogonality(self):
        d, N = 2, 2
        xi = FiducialState.builtin(d, N)
        points = [(a, b) for a in enumerate_strings(d, N) for b in enumerate_strings(d, N)]
        minus = np.array([kernel(KernelSign.MINUS, xi, a, b).matrix for a, b in points])
        plus = np.array([kernel(KernelSign.PLUS, xi, a, b).matrix for a, b in points])
        gram = np.einsum("pij,qji->pq", minus, plus)
        assert_allclose(gram, np.eye(len(points)), atol=1e-10)

    def test_single_site_stacks(self):
        xi = FiducialState.builtin(3)
        minus = kernel_stacks(xi, KernelSign.MINUS)[0]
        plus = kernel_stacks(xi, KernelSign.PLUS)[0]
        assert_allclose(np.einsum("pij,qji->pq", minus, plus), np.eye(9), atol=1e-10)

    def test_singular_fiducial(self):
        xi = FiducialState(np.array([1.0, 0.0]), 2)
        with self.assertRaises(SingularFiducialError):
            kernel_stacks(xi, KernelSign.PLUS)


class SymbolTests(SimpleTestCase):
    def test_q_of_fiducial_and_identity(self):
        xi = FiducialState.builtin(3, 2)
        zero = DString.zero(3, 2)
        self.assertAlmostEqual(q_symbol(xi.vector().projector(), zero, zero, xi).real, 1.0, places=12)
        assert_allclose(q_table(DenseOperator.identity(3, 2), xi), np.ones((9, 9)), atol=1e-12)

    def test_table_matches_pointwise_symbols(self):
        rng = np.random.default_rng(5)
        xi = FiducialState.builtin(2, 2)
        f = random_hermitian(2, 2, rng)
        q, p = q_table(f, xi), p_table(f, xi)
        for a in enumerate_strings(2, 2):
            for b in enumerate_strings(2, 2):
                self.assertAlmostEqual(q[a.index, b.index], q_symbol(f, a, b, xi), places=10)
                self.assertAlmostEqual(p[a.index, b.index], p_symbol(f, a, b, xi), places=10)

    def test_ghz_symbol_closed_form(self):
        xi = FiducialState.builtin(2, 2)
        q = q_table(ghz_state(2, 2).projector(), xi)
        for a in enumerate_strings(2, 2):
            for b in enumerate_strings(2, 2):
                self.assertAlmostEqual(q[a.index, b.index].real, ghz_q_symbol(xi, a, b), places=10)

    def test_round_trip(self):
        rng = np.random.default_rng(6)
        for d, N in ((2, 2), (3, 1)):
            xi = FiducialState.builtin(d, N)
            f = random_hermitian(d, N, rng)
            from_q = reconstruct_from_symbols(q_table(f, xi), SymbolKind.Q, xi, N)
            from_p = reconstruct_from_symbols(p_table(f, xi), SymbolKind.P, xi, N)
            assert_allclose(from_q.matrix, f.matrix, atol=1e-8)
            assert_allclose(from_p.matrix, f.matrix, atol=1e-8)

    def test_identity_expansions(self):
        xi = FiducialState.builtin(2, 2)
        eye = DenseOperator.identity(2, 2)
        for which, table in ((SymbolKind.Q, q_table(eye, xi)), (SymbolKind.P, p_table(eye, xi))):
            assert_allclose(reconstruct_from_symbols(table, which, xi, 2).matrix, np.eye(4), atol=1e-10)

    def test_mapping_input_and_missing_points(self):
        xi = FiducialState.builtin(2, 1)
        f = random_hermitian(2, 1, np.random.default_rng(7))
        q = q_table(f, xi)
        symbols = {(a, b): q[a.index, b.index] for a in enumerate_strings(2, 1) for b in enumerate_strings(2, 1)}
        assert_allclose(reconstruct_from_symbols(symbols, SymbolKind.Q, xi).matrix, f.matrix, atol=1e-10)
        symbols.pop(next(iter(symbols)))
        with self.assertRaises(MissingPointsError):
            reconstruct_from_symbols(symbols, SymbolKind.Q, xi)

    def test_average_from_symbols(self):
        rng = np.random.default_rng(8)
        xi = FiducialState.builtin(3, 2)
        rho = random_density_matrix(3, 2, rng)
        f = random_hermitian(3, 2, rng)
        expected = np.trace(rho.matrix @ f.matrix)
        self.assertAlmostEqual(average_from_symbols(q_table(rho, xi), p_table(f, xi)), expected, places=9)


class CollectiveMonomialTests(SimpleTestCase):
    def test_identity_monomial(self):
        xi = FiducialState.builtin(2, 3)
        a, b = DString((1, 0, 1), 2), DString((0, 1, 1), 2)
        self.assertAlmostEqual(p_symbol_collective_monomial(0, 0, xi, a, b), 3 / 8, places=12)

    def test_closed_form_matches_dense(self):
        d, N = 3, 2
        xi = FiducialState.builtin(d, N)
        for m in range(d):
            for n in range(d):
                dense = p_table(collective_monomial(m, n, d, N), xi)
                for a in enumerate_strings(d, N):
                    for b in enumerate_strings(d, N):
                        self.assertAlmostEqual(
                            p_symbol_collective_monomial(m, n, xi, a, b), dense[a.index, b.index], places=9,
                        )
