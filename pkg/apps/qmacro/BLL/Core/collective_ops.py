"""
Collective Hermitian operators O_{k,l} = sum_i O^(i)_{k,l} with

    O^(i)_{k,l} = I - (2 / (d (d-1))) sum_{a,b} {k a + l b} |a,b><a,b|

where {.} is reduced mod d and |a,b> are the coherent states of particle i.
"""

from __future__ import annotations

import logging

import numpy as np

from apps.qmacro.BLL.Core.fiducial import FiducialState
from apps.qmacro.BLL.Core.phase_space import kernel_stacks, reconstruct_from_symbols
from apps.qmacro.BLL.Core.qudit_ops import DenseOperator, embed_single, omega_powers
from apps.qmacro.BLL.Core.zd_strings import (
    DString, add, ensure_capacity, mod_inverse, require_prime, scale, string_table, weight,
    weight_labels,
)
from backend.exceptions import DimensionError, DomainError
from utils.enums import KernelSign, SymbolKind

logger = logging.getLogger(__name__)


def _check_label(k: int, l: int, d: int) -> None:
    if not (0 <= k < d and 0 <= l < d):
        raise DomainError(f"label ({k},{l}) out of range for d={d}")
    if (k, l) == (0, 0):
        raise DomainError("label (0,0) has no collective operator")


def _single_fiducial(xi, d: int) -> FiducialState:
    if isinstance(xi, FiducialState):
        if xi.d != d:
            raise DimensionError("fiducial and d disagree")
        return xi
    return FiducialState(np.asarray(xi, dtype=complex), d)


def _single_matrix(k: int, l: int, c: np.ndarray, d: int) -> np.ndarray:
    stack = kernel_stacks(FiducialState(c, d), KernelSign.MINUS)[0]
    weights = np.array([(k * a + l * b) % d for a in range(d) for b in range(d)], dtype=float)
    return np.eye(d, dtype=complex) - 2.0 / (d * (d - 1)) * np.tensordot(weights, stack, axes=1)


def single_particle_op(k: int, l: int, xi, d: int, particle: int = 0) -> DenseOperator:
    require_prime(d)
    _check_label(k, l, d)
    fid = _single_fiducial(xi, d)
    return DenseOperator(_single_matrix(k, l, fid.single(particle), d), d, 1)


def collective_op(k: int, l: int, xi: FiducialState, d: int, N: int) -> DenseOperator:
    require_prime(d)
    _check_label(k, l, d)
    ensure_capacity(d, N)
    fid = _single_fiducial(xi, d).for_particles(N)
    if fid.is_homogeneous:
        single = _single_matrix(k, l, fid.single(0), d)
        total = sum(embed_single(single, i, d, N) for i in range(N))
    else:
        total = sum(embed_single(_single_matrix(k, l, fid.single(i), d), i, d, N) for i in range(N))
    return DenseOperator(total, d, N)


def collective_ops(xi: FiducialState, d: int, N: int) -> dict[tuple[int, int], DenseOperator]:
    return {label: collective_op(*label, xi, d, N) for label in weight_labels(d)}


def p_symbol_O(k: int, l: int, alpha: DString, beta: DString, d: int, N: int) -> float:
    """d^-N [N - (2/(d-1)) h(k alpha + l beta)]."""
    _check_label(k, l, d)
    h = weight(add(scale(k, alpha), scale(l, beta)))
    return (N - 2.0 * h / (d - 1)) / d ** N


def p_symbol_O_table(k: int, l: int, d: int, N: int) -> np.ndarray:
    """p_symbol_O at every point, indexed [alpha index, beta index]."""
    _check_label(k, l, d)
    ensure_capacity(d, N)
    table = string_table(d, N)
    h = ((k * table[:, None, :] + l * table[None, :, :]) % d).sum(axis=2)
    return (N - 2.0 * h / (d - 1)) / d ** N


def collective_op_phase_space(k: int, l: int, xi: FiducialState, d: int, N: int) -> DenseOperator:
    """N I minus the weight-weighted coherent projectors, built from the P-symbol."""
    fid = _single_fiducial(xi, d).for_particles(N)
    return reconstruct_from_symbols(p_symbol_O_table(k, l, d, N), SymbolKind.P, fid, N)


def _tau(s: int, lam: int, d: int) -> complex:
    inv = mod_inverse(lam, d)
    powers = omega_powers(d)
    return complex(sum(r * powers[(r * s * inv) % d] for r in range(d)))


def matrix_elements(k: int, l: int, xi, d: int) -> np.ndarray:
    """<p|O^(i)_{k,l}|q> from the closed forms.

    k = 0 is diagonal: 1 - (2/(d-1)) sum_r {l r} |c_(p-r)|^2.
    k != 0 is written O_{lam, lam m} with lam = k, m = l k^-1:
        delta_pq - (2/(d(d-1))) tau_(p-q, lam) sum_r omega^(-m r (p-q)) c_(p-r) conj(c_(q-r))
    """
    require_prime(d)
    _check_label(k, l, d)
    c = _single_fiducial(xi, d).single(0)
    powers = omega_powers(d)
    out = np.zeros((d, d), dtype=complex)
    if k == 0:
        for p in range(d):
            out[p, p] = 1 - 2.0 / (d - 1) * sum(((l * r) % d) * abs(c[(p - r) % d]) ** 2 for r in range(d))
        return out
    lam, m = k, (l * mod_inverse(k, d)) % d
    for p in range(d):
        for q in range(d):
            s = (p - q) % d
            inner = sum(powers[(-m * r * s) % d] * c[(p - r) % d] * np.conj(c[(q - r) % d]) for r in range(d))
            out[p, q] = (p == q) - 2.0 / (d * (d - 1)) * _tau(s, lam, d) * inner
    return out


def commuting_sets(d: int) -> list[tuple[tuple[int, int], ...]]:
    """The d+1 sets {(lam k, lam l) : lam = 1..d-1}, one per projective direction."""
    require_prime(d)
    directions = [(0, 1)] + [(1, m) for m in range(d)]
    return [tuple(((lam * k) % d, (lam * l) % d) for lam in range(1, d)) for k, l in directions]
