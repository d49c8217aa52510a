"""
Arithmetic over Z_d, d-strings, weights and weight vectors.

Strings are enumerated with the last digit varying fastest, so the integer
index of a string is its base-d value with site 1 the most significant digit.
The same index addresses computational basis states in qudit_ops.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np
from django.conf import settings

from backend.exceptions import CapacityError, DimensionError, DomainError, NoInverseError

logger = logging.getLogger(__name__)


def is_prime(d: int) -> bool:
    if d < 2:
        return False
    return all(d % p for p in range(2, math.isqrt(d) + 1))


def require_prime(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or not is_prime(int(d)):
        raise DomainError(f"d must be prime, got {d!r}", d=d)


def max_dim() -> int:
    return int(getattr(settings, "QMACRO_MAX_DIM", 4096))


def ensure_capacity(d: int, N: int) -> None:
    """Raise CapacityError when d**N exceeds the configured size guard."""
    limit = max_dim()
    if d ** N > limit:
        raise CapacityError(
            f"d^N = {d}^{N} = {d ** N} exceeds the size guard {limit} (set QMACRO_MAX_DIM to raise it)",
            d=d, N=N, limit=limit,
        )


@dataclass(frozen=True, order=True)
class DString:
    digits: tuple[int, ...]
    d: int

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(x) for x in self.digits))
        require_prime(self.d)
        if len(self.digits) < 1:
            raise DomainError("a d-string needs at least one digit")
        if any(x < 0 or x >= self.d for x in self.digits):
            raise DomainError(f"digits {self.digits} out of range for d={self.d}")

    @property
    def N(self) -> int:
        return len(self.digits)

    @property
    def index(self) -> int:
        value = 0
        for x in self.digits:
            value = value * self.d + x
        return value

    @classmethod
    def from_index(cls, index: int, d: int, N: int) -> DString:
        if not 0 <= index < d ** N:
            raise DomainError(f"index {index} out of range for d={d}, N={N}")
        digits = []
        for _ in range(N):
            index, r = divmod(index, d)
            digits.append(r)
        return cls(tuple(reversed(digits)), d)

    @classmethod
    def zero(cls, d: int, N: int) -> DString:
        return cls((0,) * N, d)

    def __add__(self, other: DString) -> DString:
        return add(self, other)

    def __neg__(self) -> DString:
        return DString(tuple((-x) % self.d for x in self.digits), self.d)

    def __iter__(self):
        return iter(self.digits)

    def __len__(self):
        return len(self.digits)

    def __str__(self):
        return "".join(str(x) for x in self.digits) if self.d <= 10 else str(self.digits)


def _check_pair(alpha: DString, beta: DString) -> None:
    if alpha.d != beta.d or alpha.N != beta.N:
        raise DimensionError(
            f"mismatched strings: d={alpha.d}/{beta.d}, N={alpha.N}/{beta.N}"
        )


def add(alpha: DString, beta: DString) -> DString:
    _check_pair(alpha, beta)
    return DString(tuple((a + b) % alpha.d for a, b in zip(alpha.digits, beta.digits)), alpha.d)


def scale(k: int, alpha: DString) -> DString:
    if not 0 <= k < alpha.d:
        raise DomainError(f"scalar {k} not in Z_{alpha.d}")
    return DString(tuple((k * a) % alpha.d for a in alpha.digits), alpha.d)


def weight(alpha: DString) -> int:
    """Plain integer digit sum h(alpha); not reduced mod d."""
    return sum(alpha.digits)


def mod_inverse(k: int, d: int) -> int:
    require_prime(d)
    if k % d == 0:
        raise NoInverseError(f"{k} has no inverse mod {d}")
    return pow(k, -1, d)


def weight_labels(d: int) -> tuple[tuple[int, int], ...]:
    """Labels (k, l) != (0, 0) in lexicographic order."""
    return tuple((k, l) for k in range(d) for l in range(d) if (k, l) != (0, 0))


def label_names(d: int) -> list[str]:
    return [f"m{k}{l}" for k, l in weight_labels(d)]


@dataclass(frozen=True, order=True)
class WeightVector:
    entries: tuple[int, ...]
    d: int
    N: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))
        if len(self.entries) != self.d * self.d - 1:
            raise DimensionError(
                f"a weight vector for d={self.d} has {self.d * self.d - 1} entries, got {len(self.entries)}"
            )
        top = (self.d - 1) * self.N
        if any(x < 0 or x > top for x in self.entries):
            raise DomainError(f"weight entries must lie in [0, {top}], got {self.entries}")

    def __getitem__(self, label: tuple[int, int]) -> int:
        return self.entries[_label_position(self.d)[label]]

    def as_dict(self) -> dict[str, int]:
        return dict(zip(label_names(self.d), self.entries))

    @classmethod
    def zero(cls, d: int, N: int) -> WeightVector:
        return cls((0,) * (d * d - 1), d, N)

    def __str__(self):
        return "(" + ",".join(str(x) for x in self.entries) + ")"


@lru_cache(maxsize=None)
def _label_position(d: int) -> dict[tuple[int, int], int]:
    return {label: i for i, label in enumerate(weight_labels(d))}


def weight_vector(alpha: DString, beta: DString) -> WeightVector:
    _check_pair(alpha, beta)
    d = alpha.d
    entries = tuple(weight(add(scale(k, alpha), scale(l, beta))) for k, l in weight_labels(d))
    return WeightVector(entries, d, alpha.N)


def enumerate_strings(d: int, N: int) -> Iterator[DString]:
    require_prime(d)
    if N < 1:
        raise DomainError("N must be at least 1")
    ensure_capacity(d, N)
    for digits in itertools.product(range(d), repeat=N):
        yield DString(digits, d)


# ---------------------------------------------------------------------------
# Vectorized tables shared by the dense modules
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def string_table(d: int, N: int) -> np.ndarray:
    """All d^N strings as a read-only (d^N, N) integer array in enumeration order."""
    table = np.array(list(itertools.product(range(d), repeat=N)), dtype=np.int64).reshape(d ** N, N)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=32)
def place_values(d: int, N: int) -> np.ndarray:
    values = d ** np.arange(N - 1, -1, -1, dtype=np.int64)
    values.setflags(write=False)
    return values


def indices_of(digits: np.ndarray, d: int) -> np.ndarray:
    """Integer indices of a stack of digit rows (last axis = sites)."""
    return np.asarray(digits, dtype=np.int64) % d @ place_values(d, digits.shape[-1])


@lru_cache(maxsize=8)
def label_matrix(d: int) -> np.ndarray:
    """(d*d, d*d-1) table of {k a + l b} mod d; row a*d+b, column per label."""
    labels = weight_labels(d)
    out = np.empty((d * d, len(labels)), dtype=np.int64)
    for a in range(d):
        for b in range(d):
            out[a * d + b] = [(k * a + l * b) % d for k, l in labels]
    out.setflags(write=False)
    return out


def weight_rows_for_alpha(alpha_digits: np.ndarray, d: int, N: int) -> np.ndarray:
    """Weight vectors of (alpha, beta) for one alpha and every beta: shape (d^N, d*d-1)."""
    table = string_table(d, N)
    pair = alpha_digits[None, :] * d + table
    return label_matrix(d)[pair].sum(axis=1)


def distinct_weight_rows(alpha_digits: np.ndarray, d: int, N: int):
    """Distinct weight vectors over every beta for one alpha, in lexicographic order.

    Returns (rows, first beta index, counts, inverse) as given by np.unique over rows.
    """
    rows = weight_rows_for_alpha(alpha_digits, d, N)
    unique, first, inverse, counts = np.unique(
        rows, axis=0, return_index=True, return_inverse=True, return_counts=True,
    )
    return unique, first, counts, inverse.reshape(-1)
