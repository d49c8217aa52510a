"""
The measurement space: weight-vector classes, multiplicities and projected
Q-functions.

A class is the set of phase-space points (alpha, beta) sharing one weight
vector m. Classes are stored in lexicographic order of m and keyed on the exact
integer rows of m.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from django.conf import settings

from apps.qmacro.BLL.Core.fiducial import FiducialState, fiducial_matrix_element
from apps.qmacro.BLL.Core.phase_space import q_table
from apps.qmacro.BLL.Core.qudit_ops import DenseOperator, omega_powers
from apps.qmacro.BLL.Core.zd_strings import (
    DString, WeightVector, distinct_weight_rows, ensure_capacity, label_matrix, label_names,
    require_prime, string_table, weight, weight_labels,
)
from backend.exceptions import (
    CapacityError, DimensionError, DomainError, EmptyClassError, UnsupportedDimensionError,
)
from utils.cache_helper import GlobalCache
from utils.enums import SpaceMethod, StateKind

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class MeasurementSpace:
    d: int
    N: int
    method: SpaceMethod
    vectors: np.ndarray  # (N_M, d*d-1) weight vectors, rows in lexicographic order
    multiplicities: tuple[int, ...]  # exact R_m
    representatives: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    def __len__(self) -> int:
        return len(self.multiplicities)

    @cached_property
    def keys(self) -> tuple[WeightVector, ...]:
        return tuple(WeightVector(tuple(row), self.d, self.N) for row in self.vectors.tolist())

    @cached_property
    def positions(self) -> dict[tuple[int, ...], int]:
        return {tuple(row): pos for pos, row in enumerate(self.vectors.tolist())}

    @cached_property
    def r_values(self) -> np.ndarray:
        return np.array([float(r) for r in self.multiplicities])

    @property
    def total(self) -> int:
        return sum(self.multiplicities)

    def position(self, m: WeightVector) -> int:
        if m.d != self.d or m.N != self.N:
            raise DimensionError("weight vector belongs to another space")
        pos = self.positions.get(tuple(m.entries))
        if pos is None:
            raise EmptyClassError(f"weight vector {m} is not realized for d={self.d}, N={self.N}")
        return pos

    def multiplicity(self, m: WeightVector) -> int:
        return self.multiplicities[self.position(m)]

    def representative(self, m: WeightVector) -> tuple[DString, DString]:
        alpha, beta = self.representatives[self.position(m)]
        return DString(alpha, self.d), DString(beta, self.d)

    def representative_at(self, pos: int) -> tuple[DString, DString]:
        alpha, beta = self.representatives[pos]
        return DString(alpha, self.d), DString(beta, self.d)

    def items(self):
        return zip(self.keys, self.multiplicities)


def count_multiplets(d: int, N: int) -> int:
    """(N + d^2 - 1)! / ((d^2 - 1)! N!), exact."""
    return math.comb(N + d * d - 1, N)


def _max_classes() -> int:
    return int(getattr(settings, "QMACRO_MAX_CLASSES", 2_000_000))


def _vector_array(rows, d: int) -> np.ndarray:
    return np.array(rows, dtype=np.int64).reshape(len(rows), d * d - 1)


def _scan_space(d: int, N: int) -> MeasurementSpace:
    ensure_capacity(d, N)
    found: dict[tuple[int, ...], list] = {}
    for a_idx, alpha in enumerate(string_table(d, N)):
        unique, first, counts, _ = distinct_weight_rows(alpha, d, N)
        for row, b_idx, c in zip(map(tuple, unique.tolist()), first.tolist(), counts.tolist()):
            entry = found.get(row)
            if entry is None:
                found[row] = [c, (a_idx, b_idx)]
            else:
                entry[0] += c
    ordered = sorted(found)
    reps = []
    for row in ordered:
        a_idx, b_idx = found[row][1]
        reps.append((DString.from_index(a_idx, d, N).digits, DString.from_index(b_idx, d, N).digits))
    return MeasurementSpace(
        d=d, N=N, method=SpaceMethod.EXHAUSTIVE,
        vectors=_vector_array(ordered, d),
        multiplicities=tuple(found[row][0] for row in ordered),
        representatives=tuple(reps),
    )


def build_orbit_space(d: int, N: int) -> MeasurementSpace:
    """Classes from permutation orbits of (alpha, beta), i.e. multisets of N pairs (a, b).

    Each orbit contributes N!/prod(n_ab!) points. Orbits that land on the same m
    are merged, so the result matches the exhaustive scan for any prime d.
    """
    require_prime(d)
    if N < 1:
        raise DomainError("N must be at least 1")
    expected = count_multiplets(d, N)
    if expected > _max_classes():
        raise CapacityError(
            f"{expected} orbits exceed the class limit {_max_classes()} (QMACRO_MAX_CLASSES)",
            d=d, N=N,
        )
    pairs = d * d
    combos = np.array(list(itertools.combinations_with_replacement(range(pairs), N)), dtype=np.int64)
    counts = np.stack([(combos == p).sum(axis=1) for p in range(pairs)], axis=1)
    rows = (counts @ label_matrix(d)).tolist()
    fact = [math.factorial(k) for k in range(N + 1)]
    merged: dict[tuple[int, ...], list] = {}
    for occupation, row, combo in zip(counts.tolist(), rows, combos.tolist()):
        r = fact[N]
        for n in occupation:
            r //= fact[n]
        key = tuple(row)
        if key in merged:
            merged[key][0] += r
        else:
            merged[key] = [r, (tuple(p // d for p in combo), tuple(p % d for p in combo))]
    ordered = sorted(merged)
    logger.debug("orbit space d=%d N=%d: %d orbits, %d classes", d, N, len(combos), len(ordered))
    return MeasurementSpace(
        d=d, N=N, method=SpaceMethod.ORBITS,
        vectors=_vector_array(ordered, d),
        multiplicities=tuple(merged[key][0] for key in ordered),
        representatives=tuple(merged[key][1] for key in ordered),
    )


def build_measurement_space(d: int, N: int, method: SpaceMethod = SpaceMethod.EXHAUSTIVE) -> MeasurementSpace:
    require_prime(d)
    method = SpaceMethod(method)
    key = GlobalCache.key("space", method.value, d, N)
    builder = _scan_space if method is SpaceMethod.EXHAUSTIVE else build_orbit_space
    space = GlobalCache.get_or_compute(key, lambda: builder(d, N))
    logger.debug("measurement space d=%d N=%d (%s): %d classes", d, N, method.value, len(space))
    return space


def _class_positions(space: MeasurementSpace) -> np.ndarray:
    d, N = space.d, space.N
    ensure_capacity(d, N)
    out = np.empty((d ** N, d ** N), dtype=np.int64)
    for a_idx, alpha in enumerate(string_table(d, N)):
        unique, _, _, inverse = distinct_weight_rows(alpha, d, N)
        local = np.array([space.positions[tuple(row)] for row in unique.tolist()], dtype=np.int64)
        out[a_idx] = local[inverse]
    return out


def class_index(space: MeasurementSpace) -> np.ndarray:
    """Class position of every phase-space point, shape (d^N, d^N)."""
    key = GlobalCache.key("classidx", space.d, space.N)
    return GlobalCache.get_or_compute(key, lambda: _class_positions(space))


# ---------------------------------------------------------------------------
# Closed-form and asymptotic multiplicities
# ---------------------------------------------------------------------------

def _pair_count_coefficients(d: int) -> dict[tuple[int, int], list[Fraction]]:
    labels = weight_labels(d)
    scale = Fraction(2, d * d * (d - 1))
    table = {}
    for a in range(d):
        for b in range(d):
            if (a, b) == (0, 0):
                continue
            table[(a, b)] = [(d * (((k * a + l * b) % d) == d - 1) - 1) * scale for k, l in labels]
    return table


def r_closed(d: int, m: WeightVector, N: int | None = None) -> int:
    """Multiplicity from the pair counts n_ab recovered linearly from m.

    Zero when any count is negative or fractional.
    """
    if d not in (2, 3):
        raise UnsupportedDimensionError(f"closed-form multiplicities exist for d in {{2, 3}}, got {d}", d=d)
    if m.d != d:
        raise DimensionError("weight vector and d disagree")
    N = m.N if N is None else N
    counts = []
    for coeffs in _pair_count_coefficients(d).values():
        n = sum((c * x for c, x in zip(coeffs, m.entries)), Fraction(0))
        if n.denominator != 1 or n < 0:
            return 0
        counts.append(int(n))
    rest = N - sum(counts)
    if rest < 0:
        return 0
    r = math.factorial(N) // math.factorial(rest)
    for n in counts:
        r //= math.factorial(n)
    return r


def _qutrit_pairs() -> list[tuple[tuple[int, int], tuple[int, int]]]:
    seen, out = set(), []
    for k, l in weight_labels(3):
        partner = ((2 * k) % 3, (2 * l) % 3)
        if (k, l) in seen:
            continue
        seen.update({(k, l), partner})
        out.append(((k, l), partner))
    return out


def r_gaussian(d: int, m: WeightVector, N: int | None = None) -> float:
    """Unnormalized large-N Gaussian for R_m, equal to 1 at q0 = ((d-1)/2) N."""
    N = m.N if N is None else N
    if d == 2:
        dev = np.array(m.entries, dtype=float) - N / 2
        return float(np.exp(-2.0 * np.dot(dev, dev) / N))
    if d == 3:
        exponent = 0.0
        for first, second in _qutrit_pairs():
            x, y = m[first] - N, m[second] - N
            exponent += (x * x + y * y - x * y) / N
        return float(np.exp(-exponent))
    raise UnsupportedDimensionError(f"no Gaussian asymptote for d={d}", d=d)


# ---------------------------------------------------------------------------
# Projected Q-functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QTildeTable:
    space: MeasurementSpace
    values: np.ndarray

    def __getitem__(self, m: WeightVector) -> float:
        return float(self.values[self.space.position(m)])

    def total(self) -> float:
        return float(np.sum(self.values))

    def as_dict(self) -> dict[WeightVector, float]:
        return {m: float(v) for m, v in zip(self.space.keys, self.values)}

    def rows(self):
        """(m, R_m, value) in lexicographic order of m."""
        return zip(self.space.keys, self.space.multiplicities, self.values.tolist())

    def marginal(self, labels) -> dict[tuple[int, ...], float]:
        return marginal(self, labels)


def q_tilde(rho: DenseOperator, xi: FiducialState, space: MeasurementSpace) -> QTildeTable:
    """Sum of Q_rho over each class, accumulated in fixed point order."""
    if rho.d != space.d or rho.N != space.N:
        raise DimensionError("state and measurement space disagree")
    ensure_capacity(rho.d, rho.N)
    if rho.hermitian_residual() > HERMITIAN_TOL:
        raise DomainError("q_tilde needs a Hermitian operator")
    table = q_table(rho, xi)
    idx = class_index(space)
    values = np.bincount(idx.ravel(), weights=table.real.ravel(), minlength=len(space))
    return QTildeTable(space, values)


def q_tilde_symmetric(qval, space: MeasurementSpace) -> QTildeTable:
    """Q(m) R_m for a state whose Q-symbol is constant on classes.

    qval is a mapping m -> Q(m) or a callable (alpha, beta) -> Q evaluated on
    each class representative.
    """
    if isinstance(qval, Mapping):
        missing = [m for m in space.keys if m not in qval]
        if missing:
            raise EmptyClassError(f"no Q value for {len(missing)} classes, first {missing[0]}")
        q = np.array([float(np.real(qval[m])) for m in space.keys])
    elif isinstance(qval, Callable):
        q = np.array([
            float(np.real(qval(*space.representative_at(i)))) for i in range(len(space))
        ])
    else:
        raise DomainError("qval must be a mapping or a callable")
    return QTildeTable(space, q * space.r_values)


def fiducial_q_symbol(xi: FiducialState, alpha: DString, beta: DString) -> float:
    """|<xi|alpha,beta>|^2."""
    return float(abs(fiducial_matrix_element(xi, alpha, beta)) ** 2)


def ghz_q_symbol(xi: FiducialState, alpha: DString, beta: DString) -> float:
    """|<alpha,beta|GHZ>|^2 = (1/d)|sum_l omega^(l h(alpha)) prod_i c_(l - b_i)|^2."""
    fid = xi.for_particles(alpha.N)
    d = fid.d
    powers = omega_powers(d)
    h = weight(alpha)
    total = 0j
    for l in range(d):
        term = powers[(l * h) % d]
        for i, b in enumerate(beta.digits):
            term *= fid.single(i)[(l - b) % d]
        total += term
    return float(abs(total) ** 2 / d)


def _beta_level_counts(vectors: np.ndarray, d: int, N: int) -> np.ndarray:
    """Occupations n_j of beta's digits, solved from m_{0l} = sum_j n_j {l j}."""
    pos = {label: i for i, label in enumerate(weight_labels(d))}
    rhs = vectors[:, [pos[(0, l)] for l in range(1, d)]].astype(float)
    mat = np.array([[(l * j) % d for j in range(1, d)] for l in range(1, d)], dtype=float)
    levels = np.rint(np.linalg.solve(mat, rhs.T).T).astype(np.int64)
    n0 = N - levels.sum(axis=1, keepdims=True)
    return np.concatenate([n0, levels], axis=1)


def ghz_q_tilde_values(space: MeasurementSpace, xi: FiducialState) -> np.ndarray:
    """(1/d)|sum_l omega^(m_{l0}) prod_j c_(l-j)^(n_j)|^2 R_m for a homogeneous fiducial."""
    d, N = space.d, space.N
    fid = xi.for_particles(N)
    if not fid.is_homogeneous:
        raise DomainError("the class formula for GHZ needs the same fiducial on every particle")
    c = fid.single(0)
    powers = omega_powers(d)
    pos = {label: i for i, label in enumerate(weight_labels(d))}
    vectors = space.vectors
    counts = _beta_level_counts(vectors, d, N)
    total = np.zeros(len(space), dtype=complex)
    for l in range(d):
        phase = np.ones(len(space), dtype=complex) if l == 0 else powers[vectors[:, pos[(l, 0)]] % d]
        prod = np.ones(len(space), dtype=complex)
        for j in range(d):
            prod *= np.power(c[(l - j) % d], counts[:, j])
        total += phase * prod
    return np.abs(total) ** 2 / d * space.r_values


def q_tilde_analytic(state: StateKind, d: int, N: int, space: MeasurementSpace | None = None,
                     xi: FiducialState | None = None) -> QTildeTable:
    state = StateKind(state)
    if state not in (StateKind.GHZ, StateKind.FIDUCIAL):
        raise DomainError(f"no closed form for state {state.value!r}")
    fid = xi if xi is not None else FiducialState.builtin(d, N)
    if space is None:
        space = build_measurement_space(d, N, SpaceMethod.ORBITS)
    if state is StateKind.FIDUCIAL:
        # every off-origin overlap of a SIC fiducial is 1/(d+1), so xi drops out;
        # the exponent counts the off-origin sites of the class
        exponent = 2.0 * space.vectors.sum(axis=1) / (d * d * (d - 1))
        return QTildeTable(space, (d + 1.0) ** (-exponent) * space.r_values)
    return QTildeTable(space, ghz_q_tilde_values(space, fid))


def marginal(table: QTildeTable, labels) -> dict[tuple[int, ...], float]:
    """Sum Q-tilde over every axis except the chosen (k, l) labels."""
    d = table.space.d
    pos = {label: i for i, label in enumerate(weight_labels(d))}
    names = dict(zip(label_names(d), weight_labels(d)))
    cols = []
    for label in labels:
        if isinstance(label, str):
            if label not in names:
                raise DomainError(f"unknown axis {label!r}")
            label = names[label]
        label = tuple(label)
        if label not in pos:
            raise DomainError(f"unknown axis {label}")
        cols.append(pos[label])
    projected = table.space.vectors[:, cols]
    keys, inverse = np.unique(projected, axis=0, return_inverse=True)
    sums = np.bincount(inverse.ravel(), weights=table.values, minlength=len(keys))
    return {tuple(int(x) for x in key): float(v) for key, v in zip(keys, sums)}
