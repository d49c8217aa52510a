"""
Phase-space kernels, Q- and P-symbols, and reconstruction from symbols.

Both kernels factorize over particles:
    Delta^(-1)(alpha, beta) = |alpha,beta><alpha,beta|
    Delta^(+1)(a, b) = d^-2 sum_{g,delta} omega^(a delta - b g) <xi|Z^g X^delta|xi>^-1 Z^g X^delta
per particle, so Tr Delta^(+1) = d^-N and sum over all points of Delta^(+1) is I.
Symbol tables are (d^N, d^N) arrays indexed [alpha index, beta index].
"""

from __future__ import annotations

import logging
from collections.abc import Mapping

import numpy as np

from apps.qmacro.BLL.Core.fiducial import (
    FiducialState, single_coherent_matrix, single_element_table, single_matrix_element,
)
from apps.qmacro.BLL.Core.qudit_ops import DenseOperator, embed_single, kron_all, omega_powers, pauli_single
from apps.qmacro.BLL.Core.zd_strings import DString, ensure_capacity
from backend.exceptions import DimensionError, MissingPointsError, SingularFiducialError
from utils.cache_helper import GlobalCache
from utils.enums import KernelSign, PauliKind, SymbolKind

logger = logging.getLogger(__name__)

SINGULAR_TOL = 1e-12


def _single_plus_stack(c: np.ndarray, d: int) -> np.ndarray:
    elements = single_element_table(c, d)
    if np.min(np.abs(elements)) < SINGULAR_TOL:
        raise SingularFiducialError(
            "a fiducial matrix element <xi|Z^g X^delta|xi> vanishes; the dual kernel does not exist",
            d=d,
        )
    Z = pauli_single(PauliKind.Z, d).matrix
    X = pauli_single(PauliKind.X, d).matrix
    weyl = np.array([
        np.linalg.matrix_power(Z, g) @ np.linalg.matrix_power(X, dl) / elements[g, dl]
        for g in range(d) for dl in range(d)
    ]).reshape(d, d, d, d)
    powers = omega_powers(d)
    out = np.empty((d * d, d, d), dtype=complex)
    g = np.arange(d)[:, None]
    dl = np.arange(d)[None, :]
    for a in range(d):
        for b in range(d):
            phase = powers[(a * dl - b * g) % d]
            out[a * d + b] = np.einsum("gd,gdij->ij", phase, weyl) / d ** 2
    return out


def _single_minus_stack(c: np.ndarray, d: int) -> np.ndarray:
    states = single_coherent_matrix(c, d)
    return np.einsum("si,sj->sij", states, states.conj())


def kernel_stacks(xi: FiducialState, sign: KernelSign) -> list[np.ndarray]:
    """Per-particle kernel stacks, each (d*d, d, d) with row a*d + b."""
    sign = KernelSign(sign)
    key = GlobalCache.key("stack", int(sign), xi.fingerprint)

    def build():
        make = _single_plus_stack if sign is KernelSign.PLUS else _single_minus_stack
        if xi.is_homogeneous:
            one = make(xi.single(0), xi.d)
            return [one] * xi.N
        return [make(xi.single(i), xi.d) for i in range(xi.N)]

    return GlobalCache.get_or_compute(key, build)


def kernel(sign: KernelSign, xi: FiducialState, alpha: DString, beta: DString) -> DenseOperator:
    fid = xi.for_particles(alpha.N)
    if alpha.d != fid.d or beta.d != fid.d or beta.N != alpha.N:
        raise DimensionError("kernel labels disagree with the fiducial")
    ensure_capacity(fid.d, fid.N)
    d = fid.d
    key = GlobalCache.key("kernel", int(sign), fid.fingerprint, alpha.index, beta.index)

    def build():
        stacks = kernel_stacks(fid, sign)
        return kron_all([stacks[i][a * d + b] for i, (a, b) in enumerate(zip(alpha.digits, beta.digits))])

    return DenseOperator(GlobalCache.get_or_compute(key, build), d, fid.N)


# ---------------------------------------------------------------------------
# Site-by-site contractions
# ---------------------------------------------------------------------------

def contract_traces(matrices: np.ndarray, stacks: list[np.ndarray], d: int, N: int) -> np.ndarray:
    """Tr(K(alpha,beta) f) for every point and every f in a leading batch.

    matrices: (..., d^N, d^N). Returns (..., d^N, d^N) indexed [alpha, beta].
    """
    lead = matrices.shape[:-2]
    nl = len(lead)
    t = matrices.reshape(lead + (d,) * (2 * N))
    for i, stack in enumerate(stacks):
        remaining = N - i
        # f rows pair with kernel columns and vice versa
        t = np.tensordot(t, stack, axes=([nl, nl + remaining], [2, 1]))
    return _sites_to_table(t, lead, d, N)


def _sites_to_table(t: np.ndarray, lead: tuple, d: int, N: int) -> np.ndarray:
    nl = len(lead)
    t = t.reshape(lead + (d, d) * N)
    order = list(range(nl)) + [nl + 2 * i for i in range(N)] + [nl + 2 * i + 1 for i in range(N)]
    return t.transpose(order).reshape(lead + (d ** N, d ** N))


def expand_table(tables: np.ndarray, stacks: list[np.ndarray], d: int, N: int) -> np.ndarray:
    """sum over points of table[alpha, beta] * K(alpha, beta), batched over leading axes."""
    lead = tables.shape[:-2]
    nl = len(lead)
    t = tables.reshape(lead + (d,) * (2 * N))
    interleave = list(range(nl)) + [v for i in range(N) for v in (nl + i, nl + N + i)]
    t = t.transpose(interleave).reshape(lead + (d * d,) * N)
    for stack in stacks:
        t = np.tensordot(t, stack, axes=([nl], [0]))
    # axes now lead, r1, c1, r2, c2, ...
    order = list(range(nl)) + [nl + 2 * i for i in range(N)] + [nl + 2 * i + 1 for i in range(N)]
    return t.transpose(order).reshape(lead + (d ** N, d ** N))


# ---------------------------------------------------------------------------
# Symbols
# ---------------------------------------------------------------------------

def symbol_table(f: DenseOperator, xi: FiducialState, which: SymbolKind) -> np.ndarray:
    fid = xi.for_particles(f.N)
    if fid.d != f.d:
        raise DimensionError("operator and fiducial disagree on d")
    ensure_capacity(f.d, f.N)
    sign = KernelSign.MINUS if SymbolKind(which) is SymbolKind.Q else KernelSign.PLUS
    return contract_traces(f.matrix, kernel_stacks(fid, sign), f.d, f.N)


def q_table(f: DenseOperator, xi: FiducialState) -> np.ndarray:
    return symbol_table(f, xi, SymbolKind.Q)


def p_table(f: DenseOperator, xi: FiducialState) -> np.ndarray:
    return symbol_table(f, xi, SymbolKind.P)


def q_symbol(f: DenseOperator, alpha: DString, beta: DString, xi: FiducialState) -> complex:
    return complex(np.trace(kernel(KernelSign.MINUS, xi, alpha, beta).matrix @ f.matrix))


def p_symbol(f: DenseOperator, alpha: DString, beta: DString, xi: FiducialState) -> complex:
    return complex(np.trace(kernel(KernelSign.PLUS, xi, alpha, beta).matrix @ f.matrix))


def reconstruct_from_symbols(symbols, which: SymbolKind, xi: FiducialState, N: int | None = None) -> DenseOperator:
    """f = sum Q_f Delta^(+1) = sum P_f Delta^(-1).

    symbols is either a (d^N, d^N) array or a mapping {(alpha, beta): value}
    covering every point.
    """
    d = xi.d
    if isinstance(symbols, Mapping):
        if N is None:
            first = next(iter(symbols), None)
            if first is None:
                raise MissingPointsError("empty symbol table")
            N = first[0].N
        dim = d ** N
        table = np.full((dim, dim), np.nan, dtype=complex)
        for (alpha, beta), value in symbols.items():
            table[alpha.index, beta.index] = value
        missing = int(np.isnan(table.real).sum())
        if missing:
            raise MissingPointsError(f"{missing} of {dim * dim} phase-space points have no symbol", missing=missing)
    else:
        table = np.asarray(symbols, dtype=complex)
        N = N or int(round(np.log(table.shape[0]) / np.log(d)))
        if table.shape != (d ** N, d ** N):
            raise MissingPointsError(f"symbol table shape {table.shape} does not cover d^N x d^N points")
        if np.any(np.isnan(table)):
            raise MissingPointsError("symbol table contains NaN entries")
    fid = xi.for_particles(N)
    ensure_capacity(d, N)
    sign = KernelSign.PLUS if SymbolKind(which) is SymbolKind.Q else KernelSign.MINUS
    return DenseOperator(expand_table(table, kernel_stacks(fid, sign), d, N), d, N)


def average_from_symbols(q_of_rho: np.ndarray, p_of_f: np.ndarray) -> complex:
    """<f> = sum over points of P_f Q_rho."""
    return complex(np.sum(p_of_f * q_of_rho))


# ---------------------------------------------------------------------------
# Collective monomials s_mn = sum_i Z_i^m X_i^n
# ---------------------------------------------------------------------------

def collective_monomial(m: int, n: int, d: int, N: int) -> DenseOperator:
    ensure_capacity(d, N)
    Z = pauli_single(PauliKind.Z, d).matrix
    X = pauli_single(PauliKind.X, d).matrix
    single = np.linalg.matrix_power(Z, m % d) @ np.linalg.matrix_power(X, n % d)
    total = sum(embed_single(single, i, d, N) for i in range(N))
    return DenseOperator(total, d, N)


def p_symbol_collective_monomial(m: int, n: int, xi: FiducialState, alpha: DString, beta: DString) -> complex:
    """Closed-form P-symbol of s_mn at (alpha, beta)."""
    fid = xi.for_particles(alpha.N)
    d, N = fid.d, fid.N
    powers = omega_powers(d)
    total = 0j
    for i, (a, b) in enumerate(zip(alpha.digits, beta.digits)):
        element = single_matrix_element(fid.single(i), (-m) % d, (-n) % d, d)
        if abs(element) < SINGULAR_TOL:
            raise SingularFiducialError(f"<xi|Z^{-m} X^{-n}|xi> vanishes on particle {i}")
        total += powers[(m * b - n * a) % d] / element
    return complex(powers[(m * n) % d] * total / d ** N)
