"""
Dense generalized Pauli operators for N qudits.

Basis state |l_1 ... l_N> sits at index sum_i l_i d^(N-i), i.e. the same
index zd_strings assigns to the string (l_1, ..., l_N).
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np

from apps.qmacro.BLL.Core.zd_strings import (
    DString, ensure_capacity, indices_of, require_prime, string_table,
)
from backend.exceptions import DimensionError, DomainError
from utils.enums import PauliKind

logger = logging.getLogger(__name__)

TOL = 1e-10


def omega(d: int) -> complex:
    return np.exp(2j * np.pi / d)


@lru_cache(maxsize=16)
def omega_powers(d: int) -> np.ndarray:
    """omega**r for r in 0..d-1, computed from exact angles."""
    powers = np.exp(2j * np.pi * np.arange(d) / d)
    powers.setflags(write=False)
    return powers


@dataclass(frozen=True, eq=False)
class DenseOperator:
    matrix: np.ndarray
    d: int
    N: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        dim = self.d ** self.N
        if m.shape != (dim, dim):
            raise DimensionError(f"operator shape {m.shape} does not match d^N = {dim}")
        if not np.all(np.isfinite(m)):
            raise DomainError("operator has non-finite entries")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.d ** self.N

    def dagger(self) -> DenseOperator:
        return DenseOperator(self.matrix.conj().T, self.d, self.N)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermitian_residual(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

    def __matmul__(self, other: DenseOperator) -> DenseOperator:
        _same_space(self, other)
        return DenseOperator(self.matrix @ other.matrix, self.d, self.N)

    def __add__(self, other: DenseOperator) -> DenseOperator:
        _same_space(self, other)
        return DenseOperator(self.matrix + other.matrix, self.d, self.N)

    def __sub__(self, other: DenseOperator) -> DenseOperator:
        _same_space(self, other)
        return DenseOperator(self.matrix - other.matrix, self.d, self.N)

    def __mul__(self, scalar) -> DenseOperator:
        return DenseOperator(self.matrix * scalar, self.d, self.N)

    __rmul__ = __mul__

    def allclose(self, other: DenseOperator, atol: float = TOL) -> bool:
        _same_space(self, other)
        return bool(np.allclose(self.matrix, other.matrix, atol=atol, rtol=0))

    @classmethod
    def identity(cls, d: int, N: int) -> DenseOperator:
        return cls(np.eye(d ** N, dtype=complex), d, N)


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    d: int
    N: int
    normalized: bool = field(default=True)

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if v.shape[0] != self.d ** self.N:
            raise DimensionError(f"state length {v.shape[0]} does not match d^N = {self.d ** self.N}")
        if self.normalized and abs(np.linalg.norm(v) - 1.0) > TOL:
            raise DomainError(f"state flagged normalized has norm {np.linalg.norm(v):.3e}")
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.d ** self.N

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def projector(self) -> DenseOperator:
        v = self.amplitudes
        return DenseOperator(np.outer(v, v.conj()), self.d, self.N)

    def inner(self, other: StateVector) -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def _same_space(a, b) -> None:
    if a.d != b.d or a.N != b.N:
        raise DimensionError(f"operators live on different spaces: ({a.d},{a.N}) vs ({b.d},{b.N})")


def pauli_single(kind: PauliKind, d: int) -> DenseOperator:
    require_prime(d)
    kind = PauliKind(kind)
    if kind is PauliKind.Z:
        return DenseOperator(np.diag(omega_powers(d)), d, 1)
    # X|l> = |l+1 mod d>
    return DenseOperator(np.roll(np.eye(d, dtype=complex), 1, axis=0), d, 1)


def monomial_matrix(alpha_digits: np.ndarray, beta_digits: np.ndarray, d: int) -> np.ndarray:
    """Z_alpha X_beta as a dense matrix.

    (Z_alpha X_beta)[mu, lambda] = omega^(alpha . mu) when mu = lambda + beta, else 0.
    """
    alpha_digits = np.asarray(alpha_digits, dtype=np.int64)
    beta_digits = np.asarray(beta_digits, dtype=np.int64)
    N = alpha_digits.shape[0]
    table = string_table(d, N)
    shifted = (table + beta_digits) % d
    rows = indices_of(shifted, d)
    phases = omega_powers(d)[(shifted @ alpha_digits) % d]
    out = np.zeros((d ** N, d ** N), dtype=complex)
    out[rows, np.arange(d ** N)] = phases
    return out


def monomial(alpha: DString, beta: DString) -> DenseOperator:
    if alpha.d != beta.d or alpha.N != beta.N:
        raise DimensionError("alpha and beta must share d and N")
    ensure_capacity(alpha.d, alpha.N)
    return DenseOperator(
        monomial_matrix(np.array(alpha.digits), np.array(beta.digits), alpha.d), alpha.d, alpha.N
    )


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, factors)


def embed_single(op: np.ndarray, site: int, d: int, N: int) -> np.ndarray:
    """I x ... x op (at site) x ... x I."""
    eye = np.eye(d, dtype=complex)
    return kron_all([op if i == site else eye for i in range(N)])


def basis_state(digits: Sequence[int], d: int) -> StateVector:
    s = DString(tuple(digits), d)
    ensure_capacity(d, s.N)
    v = np.zeros(d ** s.N, dtype=complex)
    v[s.index] = 1.0
    return StateVector(v, d, s.N)


def ghz_state(d: int, N: int) -> StateVector:
    require_prime(d)
    ensure_capacity(d, N)
    v = np.zeros(d ** N, dtype=complex)
    step = sum(d ** i for i in range(N))  # index of |1...1>
    v[np.arange(d) * step] = 1.0 / math.sqrt(d)
    return StateVector(v, d, N)


def _validate_permutation(perm: Sequence[int], N: int) -> tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(N)):
        raise DomainError(f"{perm} is not a permutation of {N} sites")
    return perm


def permutation_indices(perm: Sequence[int], d: int, N: int) -> np.ndarray:
    """Index map of P_perm: P|l_1..l_N> = |l'> with l'_{perm[i]} = l_i."""
    perm = _validate_permutation(perm, N)
    table = string_table(d, N)
    moved = np.empty_like(table)
    moved[:, list(perm)] = table
    return indices_of(moved, d)


def permutation_matrix(perm: Sequence[int], d: int, N: int) -> np.ndarray:
    ensure_capacity(d, N)
    target = permutation_indices(perm, d, N)
    out = np.zeros((d ** N, d ** N))
    out[target, np.arange(d ** N)] = 1.0
    return out


def permute_state(rho: DenseOperator, perm: Sequence[int]) -> DenseOperator:
    """P rho P^dagger with P relabeling tensor factors."""
    target = permutation_indices(perm, rho.d, rho.N)
    out = np.empty_like(rho.matrix)
    out[np.ix_(target, target)] = rho.matrix
    return DenseOperator(out, rho.d, rho.N)


def all_permutations(N: int):
    return itertools.permutations(range(N))


def random_density_matrix(d: int, N: int, rng: np.random.Generator, pure: bool = False) -> DenseOperator:
    dim = d ** N
    if pure:
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        return DenseOperator(np.outer(v, v.conj()), d, N)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return DenseOperator(rho / np.trace(rho).real, d, N)
