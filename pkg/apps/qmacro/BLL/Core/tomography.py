"""
Full-space collective tomography.

D_m sums the Weyl monomials Z_alpha X_beta over one weight class. The
reconstruction from projected Q-functions (or from the averages <D_m>)
returns the full symmetrization of the measured state.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from apps.qmacro.BLL.Core.collective_ops import collective_ops
from apps.qmacro.BLL.Core.fiducial import FiducialState
from apps.qmacro.BLL.Core.macro_space import MeasurementSpace, QTildeTable, class_index
from apps.qmacro.BLL.Core.phase_space import expand_table, kernel_stacks
from apps.qmacro.BLL.Core.qudit_ops import (
    DenseOperator, StateVector, all_permutations, omega_powers, permutation_indices, permute_state,
)
from apps.qmacro.BLL.Core.zd_strings import (
    WeightVector, ensure_capacity, indices_of, string_table, weight_labels,
)
from backend.exceptions import CapacityError, DimensionError, DomainError, IncompleteDataError
from utils.enums import KernelSign

logger = logging.getLogger(__name__)

MAX_SYMMETRIZE_N = 8
PRUNE_TOL = 1e-10
RESIDUAL_TOL = 1e-8


# ---------------------------------------------------------------------------
# Weyl decomposition M = sum c_{gamma,delta} Z_gamma X_delta
# ---------------------------------------------------------------------------

def _shifted_columns(d: int, N: int) -> np.ndarray:
    """cols[delta, mu] = index of the string mu - delta."""
    table = string_table(d, N)
    return np.stack([indices_of(table - delta, d) for delta in table])


def weyl_coefficients(matrix: np.ndarray, d: int, N: int) -> np.ndarray:
    """c[gamma, delta] = d^-N Tr((Z_gamma X_delta)^dagger M), one FFT per delta."""
    dim = d ** N
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (dim, dim):
        raise DimensionError(f"matrix shape {matrix.shape} does not match d^N = {dim}")
    cols = _shifted_columns(d, N)
    rows = np.arange(dim)
    out = np.empty((dim, dim), dtype=complex)
    shape = (d,) * N
    for di in range(dim):
        diagonal = matrix[rows, cols[di]].reshape(shape)
        out[:, di] = np.fft.fftn(diagonal).ravel() / dim
    return out


def from_weyl_coefficients(coefficients: np.ndarray, d: int, N: int) -> np.ndarray:
    """sum c[gamma, delta] Z_gamma X_delta as a dense matrix."""
    dim = d ** N
    coefficients = np.asarray(coefficients, dtype=complex)
    cols = _shifted_columns(d, N)
    rows = np.arange(dim)
    out = np.zeros((dim, dim), dtype=complex)
    shape = (d,) * N
    for di in range(dim):
        column = coefficients[:, di]
        if not np.any(column):
            continue
        out[rows, cols[di]] = np.fft.ifftn(column.reshape(shape)).ravel() * dim
    return out


# ---------------------------------------------------------------------------
# Symmetrized monomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DmOperator:
    m: WeightVector
    operator: DenseOperator

    @property
    def matrix(self) -> np.ndarray:
        return self.operator.matrix


def d_m_operator(m: WeightVector, space: MeasurementSpace) -> DmOperator:
    d, N = space.d, space.N
    ensure_capacity(d, N)
    pos = space.position(m)
    indicator = (class_index(space) == pos).astype(complex)
    return DmOperator(m, DenseOperator(from_weyl_coefficients(indicator, d, N), d, N))


def d_m_averages(rho: DenseOperator, space: MeasurementSpace) -> np.ndarray:
    """Tr(rho D_m) for every class, in space order."""
    if rho.d != space.d or rho.N != space.N:
        raise DimensionError("state and measurement space disagree")
    dim = rho.dim
    # Tr(rho P) = conj(Tr(P^dagger rho^dagger)) for every monomial P
    traces = np.conj(weyl_coefficients(rho.matrix.conj().T, rho.d, rho.N)) * dim
    idx = class_index(space).ravel()
    real = np.bincount(idx, weights=traces.real.ravel(), minlength=len(space))
    imag = np.bincount(idx, weights=traces.imag.ravel(), minlength=len(space))
    return real + 1j * imag


def d_m_average(rho: DenseOperator, m: WeightVector, space: MeasurementSpace) -> complex:
    return complex(d_m_averages(rho, space)[space.position(m)])


def z_weight_sum(h: int, d: int, N: int) -> DenseOperator:
    """sum over strings mu with h(mu) = h of Z_mu (diagonal)."""
    ensure_capacity(d, N)
    table = string_table(d, N)
    selected = table[table.sum(axis=1) == h]
    phases = omega_powers(d)[(table @ selected.T) % d].sum(axis=1)
    return DenseOperator(np.diag(phases), d, N)


# ---------------------------------------------------------------------------
# Reconstruction
# ---------------------------------------------------------------------------

def _class_values(values, space: MeasurementSpace, what: str) -> np.ndarray:
    if isinstance(values, QTildeTable):
        if values.space.d != space.d or values.space.N != space.N:
            raise DimensionError(f"{what} table belongs to another space")
        return np.asarray(values.values)
    if isinstance(values, Mapping):
        missing = [m for m in space.keys if m not in values]
        if missing:
            raise IncompleteDataError(
                f"{what} is missing {len(missing)} of {len(space)} classes, first {missing[0]}",
                missing=len(missing),
            )
        return np.array([values[m] for m in space.keys])
    arr = np.asarray(values)
    if arr.shape != (len(space),):
        raise IncompleteDataError(f"{what} has {arr.shape[0] if arr.ndim else 0} entries, expected {len(space)}")
    return arr


def reconstruct_full(qtilde, xi: FiducialState, space: MeasurementSpace) -> DenseOperator:
    """sum_m Q(m) R_m^-1 Delta^(+1)(m)."""
    d, N = space.d, space.N
    ensure_capacity(d, N)
    per_class = _class_values(qtilde, space, "Q-tilde") / space.r_values
    table = per_class[class_index(space)]
    stacks = kernel_stacks(xi.for_particles(N), KernelSign.PLUS)
    return DenseOperator(expand_table(table.astype(complex), stacks, d, N), d, N)


def reconstruct_from_averages(averages, space: MeasurementSpace) -> DenseOperator:
    """d^-N sum_m R_m^-1 <D_m> D_m^dagger."""
    d, N = space.d, space.N
    ensure_capacity(d, N)
    per_class = np.conj(_class_values(averages, space, "averages")) / space.r_values
    summed = from_weyl_coefficients(per_class[class_index(space)], d, N)
    return DenseOperator(summed.conj().T / d ** N, d, N)


def symmetrize(rho: DenseOperator) -> DenseOperator:
    """(1/N!) sum over permutations of P rho P^dagger."""
    if rho.N > MAX_SYMMETRIZE_N:
        raise CapacityError(f"symmetrizing {rho.N} particles needs {math.factorial(rho.N)} permutations")
    ensure_capacity(rho.d, rho.N)
    total = reduce(lambda acc, perm: acc + permute_state(rho, perm).matrix,
                   all_permutations(rho.N), np.zeros_like(rho.matrix))
    return DenseOperator(total / math.factorial(rho.N), rho.d, rho.N)


def fidelity(rho: DenseOperator, rho_rec: DenseOperator) -> float:
    return float(np.real(np.trace(rho.matrix @ rho_rec.matrix)))


def pure_fidelity(psi: StateVector) -> float:
    """(1/N!) sum_pi |<psi|P_pi|psi>|^2."""
    if psi.N > MAX_SYMMETRIZE_N:
        raise CapacityError(f"{math.factorial(psi.N)} permutations requested")
    v = psi.amplitudes
    total = 0.0
    for perm in all_permutations(psi.N):
        moved = np.empty_like(v)
        moved[permutation_indices(perm, psi.d, psi.N)] = v
        total += abs(np.vdot(v, moved)) ** 2
    return total / math.factorial(psi.N)


# ---------------------------------------------------------------------------
# Expansion in collective operators
# ---------------------------------------------------------------------------

@dataclass
class CollectiveExpansion:
    coefficients: dict[tuple[tuple[int, int], ...], complex]
    labels: tuple[tuple[int, int], ...]
    degree: int
    residual: float
    rank: int
    columns: int = field(default=0)

    @property
    def converged(self) -> bool:
        return self.residual < RESIDUAL_TOL

    def rebuild(self, ops: Mapping[tuple[int, int], DenseOperator], d: int, N: int) -> DenseOperator:
        total = np.zeros((d ** N, d ** N), dtype=complex)
        for word, coef in self.coefficients.items():
            total += coef * _word_matrix(word, ops, d, N)
        return DenseOperator(total, d, N)

    def describe(self) -> list[str]:
        out = []
        for word, coef in self.coefficients.items():
            name = "*".join(f"O{k}{l}" for k, l in word) or "I"
            out.append(f"({coef.real:+.10g}{coef.imag:+.10g}j) {name}")
        return out


def _word_matrix(word, ops, d: int, N: int) -> np.ndarray:
    out = np.eye(d ** N, dtype=complex)
    for label in word:
        out = out @ ops[label].matrix
    return out


def _ordered_words(pool, k: int):
    return itertools.product(pool, repeat=k)


def _span_is_closed(ops, labels, d: int, N: int, tol: float) -> bool:
    """True when every commutator of the labelled operators lies in their linear span."""
    if len(labels) < 2:
        return True
    basis = np.stack([weyl_coefficients(ops[label].matrix, d, N).ravel() for label in labels], axis=1)
    for a, b in itertools.combinations(labels, 2):
        A, B = ops[a].matrix, ops[b].matrix
        target = weyl_coefficients(A @ B - B @ A, d, N).ravel()
        coef = np.linalg.lstsq(basis, target, rcond=None)[0]
        if np.max(np.abs(basis @ coef - target), initial=0.0) > tol:
            return False
    return True


def expand_in_collective(target: DenseOperator, ops: Mapping[tuple[int, int], DenseOperator],
                         labels=None, max_degree: int | None = None, tol: float = RESIDUAL_TOL) -> CollectiveExpansion:
    """Least-squares expansion of target in monomials of the given operators.

    The degree grows from 0 until the Weyl-coefficient residual drops below tol.
    Sorted words suffice when the span of the operators is closed under
    commutators (a commuting set, or every label at once); otherwise every
    ordered word of each degree is a column.
    """
    d, N = target.d, target.N
    labels = tuple(labels) if labels is not None else tuple(sorted(ops))
    max_degree = N if max_degree is None else max_degree
    if _span_is_closed(ops, labels, d, N, tol):
        words_of_degree = itertools.combinations_with_replacement
    else:
        logger.debug("labels %s do not close under commutators; using ordered words", labels)
        words_of_degree = _ordered_words
    rhs = weyl_coefficients(target.matrix, d, N).ravel()
    columns: list[np.ndarray] = []
    words: list[tuple] = []
    result = None
    for degree in range(max_degree + 1):
        for word in words_of_degree(labels, degree):
            words.append(word)
            columns.append(weyl_coefficients(_word_matrix(word, ops, d, N), d, N).ravel())
        design = np.stack(columns, axis=1)
        solution, _, rank, _ = np.linalg.lstsq(design, rhs, rcond=None)
        residual = float(np.max(np.abs(design @ solution - rhs), initial=0.0))
        coefficients = {w: complex(c) for w, c in zip(words, solution) if abs(c) > PRUNE_TOL}
        result = CollectiveExpansion(coefficients, labels, degree, residual, int(rank), len(words))
        if residual < tol:
            break
    if not result.converged:
        logger.warning("collective expansion stopped at degree %d with residual %.3e (rank %d of %d)",
                       result.degree, result.residual, result.rank, result.columns)
    return result


def is_diagonal_class(m: WeightVector) -> bool:
    """True for the Z-only classes (beta = 0, so every m_{0l} vanishes)."""
    return all(m[(0, l)] == 0 for l in range(1, m.d))


def expand_dm_in_collective(m: WeightVector, space: MeasurementSpace, xi: FiducialState,
                            ops: Mapping[tuple[int, int], DenseOperator] | None = None,
                            max_degree: int | None = None) -> CollectiveExpansion:
    """Expand D_m in collective operators.

    Z-only classes use the diagonal set O_{0,l}; other classes use every label.
    """
    d, N = space.d, space.N
    if d not in (2, 3):
        raise DomainError(f"collective expansions are worked for d in {{2, 3}}, got {d}")
    ops = ops if ops is not None else collective_ops(xi, d, N)
    labels = [(0, l) for l in range(1, d)] if is_diagonal_class(m) else list(weight_labels(d))
    target = d_m_operator(m, space).operator
    return expand_in_collective(target, ops, labels=labels, max_degree=max_degree)
