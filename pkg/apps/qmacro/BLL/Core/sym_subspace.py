"""
Symmetric subspace: Dicke basis, projected coherent states, the collective
POVM E_m = d^-N R_m |phi_m><phi_m| and its dual frame d^N R_m^-1 Delta_s(m).

Dicke states |p> are ordered lexicographically in the occupations
(p_1, ..., p_{d-1}) of levels 1..d-1.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy import linalg

from apps.qmacro.BLL.Core.fiducial import FiducialState, coherent_state, fiducial_matrix_element
from apps.qmacro.BLL.Core.macro_space import MeasurementSpace, class_index
from apps.qmacro.BLL.Core.phase_space import expand_table, kernel_stacks
from apps.qmacro.BLL.Core.qudit_ops import DenseOperator, StateVector, omega_powers
from apps.qmacro.BLL.Core.tomography import d_m_operator
from apps.qmacro.BLL.Core.zd_strings import (
    DString, WeightVector, ensure_capacity, require_prime, string_table,
)
from backend.exceptions import DimensionError, DomainError, IncompleteDataError
from utils.cache_helper import GlobalCache
from utils.enums import KernelSign

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-8
HERMITIAN_TOL = 1e-10
# d^{2N} * chunk entries per batched kernel expansion
CHUNK_ENTRIES = 4_000_000


def sym_dimension(d: int, N: int) -> int:
    """(N + d - 1)! / ((d - 1)! N!)."""
    return math.comb(N + d - 1, N)


@dataclass(frozen=True, order=True)
class SymBasisIndex:
    p: tuple[int, ...]
    N: int

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(int(x) for x in self.p))
        if any(x < 0 for x in self.p) or sum(self.p) > self.N:
            raise DomainError(f"occupations {self.p} invalid for N={self.N}")

    @property
    def d(self) -> int:
        return len(self.p) + 1

    @property
    def occupations(self) -> tuple[int, ...]:
        """Counts of every level 0..d-1."""
        return (self.N - sum(self.p),) + self.p

    def normalization(self) -> float:
        return math.sqrt(math.prod(math.factorial(x) for x in self.occupations) / math.factorial(self.N))


def sym_basis_indices(d: int, N: int) -> list[SymBasisIndex]:
    require_prime(d)
    return [SymBasisIndex(p, N) for p in itertools.product(range(N + 1), repeat=d - 1) if sum(p) <= N]


def eta(lam: DString) -> tuple[int, ...]:
    """Occupation counts (eta_1, ..., eta_{d-1}) of a string."""
    counts = np.bincount(np.array(lam.digits), minlength=lam.d)
    return tuple(int(x) for x in counts[1:])


def eta_polynomial(lam: DString) -> tuple[int, ...]:
    """The same counts from the Lagrange indicator polynomial prod_{k != i} (l - k)/(i - k)."""
    d = lam.d
    out = []
    for i in range(1, d):
        total = Fraction(0)
        for l in lam.digits:
            term = Fraction(1)
            for k in range(d):
                if k != i:
                    term *= Fraction(l - k, i - k)
            total += term
        out.append(int(total))
    return tuple(out)


def _occupation_table(d: int, N: int) -> np.ndarray:
    table = string_table(d, N)
    return np.stack([(table == i).sum(axis=1) for i in range(1, d)], axis=1)


def _dicke_indicator(d: int, N: int) -> np.ndarray:
    """W[lambda, t] = 1 when eta(lambda) = p_t."""
    occ = _occupation_table(d, N)
    basis = np.array([b.p for b in sym_basis_indices(d, N)], dtype=np.int64)
    return np.all(occ[:, None, :] == basis[None, :, :], axis=2).astype(float)


def dicke_isometry(d: int, N: int) -> np.ndarray:
    """V with the Dicke states as columns, shape (d^N, d_sym)."""
    ensure_capacity(d, N)

    def build():
        norms = np.array([b.normalization() for b in sym_basis_indices(d, N)])
        return _dicke_indicator(d, N) * norms[None, :]

    return GlobalCache.get_or_compute(GlobalCache.key("dicke", d, N), build)


def dicke_state(p: SymBasisIndex, d: int, N: int) -> StateVector:
    if p.N != N or p.d != d:
        raise DomainError(f"index {p} does not belong to d={d}, N={N}")
    basis = sym_basis_indices(d, N)
    return StateVector(dicke_isometry(d, N)[:, basis.index(p)], d, N)


def projector_sym(d: int, N: int) -> DenseOperator:
    V = dicke_isometry(d, N)
    return DenseOperator(V @ V.T, d, N)


@dataclass(frozen=True, eq=False)
class SymState:
    matrix: np.ndarray
    d: int
    N: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        dim = sym_dimension(self.d, self.N)
        if m.shape != (dim, dim):
            raise DimensionError(f"symmetric operator shape {m.shape} does not match d_sym = {dim}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermitian_residual(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def to_full(self) -> DenseOperator:
        V = dicke_isometry(self.d, self.N)
        return DenseOperator(V @ self.matrix @ V.T, self.d, self.N)

    def allclose(self, other: SymState, atol: float = 1e-10) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, atol=atol, rtol=0))

    @classmethod
    def maximally_mixed(cls, d: int, N: int) -> SymState:
        dim = sym_dimension(d, N)
        return cls(np.eye(dim) / dim, d, N)


def to_symmetric(rho: DenseOperator) -> SymState:
    """V^dagger rho V, warning when rho has weight outside the symmetric subspace."""
    V = dicke_isometry(rho.d, rho.N)
    compressed = V.T @ rho.matrix @ V
    residual = float(np.max(np.abs(rho.matrix - V @ compressed @ V.T), initial=0.0))
    if residual > SYMMETRY_TOL:
        logger.warning("state is not symmetric: residual %.3e outside the symmetric subspace", residual)
    return SymState(compressed, rho.d, rho.N)


# ---------------------------------------------------------------------------
# Projected coherent states
# ---------------------------------------------------------------------------

def _upsilon(alpha: DString, beta: DString, fid: FiducialState) -> dict[tuple[int, ...], complex]:
    """Coefficients of prod_i (sum_l <l|a_i,b_i> x_l), x_0 = 1, by occupation of levels 1..d-1."""
    d, N = fid.d, alpha.N
    powers = omega_powers(d)
    poly = np.zeros((N + 1,) * (d - 1), dtype=complex)
    poly[(0,) * (d - 1)] = 1.0
    for i, (a, b) in enumerate(zip(alpha.digits, beta.digits)):
        c = fid.single(i)
        amps = [powers[(a * l) % d] * c[(l - b) % d] for l in range(d)]
        nxt = amps[0] * poly
        for j in range(1, d):
            shifted = np.zeros_like(poly)
            src = [slice(None)] * (d - 1)
            dst = [slice(None)] * (d - 1)
            src[j - 1] = slice(0, N)
            dst[j - 1] = slice(1, N + 1)
            shifted[tuple(dst)] = poly[tuple(src)]
            nxt = nxt + amps[j] * shifted
        poly = nxt
    return {b.p: complex(poly[b.p]) for b in sym_basis_indices(d, N)}


def phi_state(m: WeightVector, xi: FiducialState, space: MeasurementSpace) -> np.ndarray:
    """Pi_s |alpha,beta> in Dicke coordinates for a representative of class m."""
    alpha, beta = space.representative(m)
    return phi_vector(alpha, beta, xi)


def phi_vector(alpha: DString, beta: DString, xi: FiducialState) -> np.ndarray:
    fid = xi.for_particles(alpha.N)
    upsilon = _upsilon(alpha, beta, fid)
    basis = sym_basis_indices(fid.d, alpha.N)
    return np.array([b.normalization() * upsilon[b.p] for b in basis])


def phi_vector_dense(alpha: DString, beta: DString, xi: FiducialState) -> np.ndarray:
    V = dicke_isometry(xi.d, alpha.N)
    return V.T @ coherent_state(xi, alpha, beta).amplitudes


# ---------------------------------------------------------------------------
# Dual frames
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChartSelection:
    retained: np.ndarray  # outcome positions kept as coordinates
    jacobian: np.ndarray  # d sigma / d sigma_retained, shape (K, r)
    offset: np.ndarray  # probabilities of the maximally mixed state


@dataclass(frozen=True)
class CramerRaoResult:
    bound: float
    rank: int
    retained: int


def traceless_basis(dim: int) -> np.ndarray:
    """Generalized Gell-Mann matrices (symmetric, antisymmetric, diagonal), shape (dim^2 - 1, dim, dim)."""
    out = []
    for j in range(dim):
        for k in range(j + 1, dim):
            sym = np.zeros((dim, dim), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            anti = np.zeros((dim, dim), dtype=complex)
            anti[j, k], anti[k, j] = -1j, 1j
            out.extend([sym, anti])
    for l in range(1, dim):
        diag = np.zeros(dim)
        diag[:l] = 1.0
        diag[l] = -l
        out.append(np.diag(diag * math.sqrt(2.0 / (l * (l + 1)))).astype(complex))
    return np.array(out).reshape(-1, dim, dim)


@dataclass(frozen=True, eq=False)
class TomographyFrame:
    """Effects E_k and duals G_k on the symmetric subspace with sum_k Tr(E_k rho) G_k = rho."""

    effects: np.ndarray  # (K, D, D)
    duals: np.ndarray  # (K, D, D)
    d: int
    N: int
    labels: tuple = ()

    @property
    def size(self) -> int:
        return self.effects.shape[0]

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    def probabilities(self, rho: SymState) -> np.ndarray:
        return np.real(np.einsum("kij,ji->k", self.effects, rho.matrix))

    def reconstruct(self, sigma) -> SymState:
        sigma = np.asarray(sigma, dtype=float)
        if sigma.shape != (self.size,):
            raise IncompleteDataError(f"{sigma.shape[0] if sigma.ndim else 0} probabilities for {self.size} outcomes")
        return SymState(np.tensordot(sigma, self.duals, axes=1), self.d, self.N)

    def completeness_residual(self) -> float:
        return float(np.max(np.abs(self.effects.sum(axis=0) - np.eye(self.dim))))

    def a_matrix(self) -> np.ndarray:
        """A_pq = Tr(G_p G_q); sum A_pq dsigma_p dsigma_q is the squared HS error."""
        flat = self.duals.reshape(self.size, -1)
        gram = flat @ self.duals.transpose(0, 2, 1).reshape(self.size, -1).T
        return np.real(gram + gram.T) / 2

    @cached_property
    def chart(self) -> ChartSelection:
        """Retain d_sym^2 - 1 outcomes whose probabilities coordinate the state space."""
        basis = traceless_basis(self.dim)
        L = np.real(np.einsum("kij,bji->kb", self.effects, basis))
        _, r, piv = linalg.qr(L.T, pivoting=True, mode="economic")
        diag = np.abs(np.diag(r))
        rank = int(np.sum(diag > 1e-10 * max(diag[0], 1.0))) if diag.size else 0
        retained = np.sort(piv[:rank])
        jacobian = L @ np.linalg.pinv(L[retained])
        offset = self.probabilities(SymState.maximally_mixed(self.d, self.N))
        return ChartSelection(retained=retained, jacobian=jacobian, offset=offset)

    def fisher_matrix(self, rho: SymState, M: int) -> np.ndarray:
        sigma = self.probabilities(rho)
        keep = sigma > 1e-14
        J = self.chart.jacobian[keep]
        return M * (J.T / sigma[keep]) @ J

    def cramer_rao(self, rho: SymState, M: int) -> CramerRaoResult:
        fisher = self.fisher_matrix(rho, M)
        J = self.chart.jacobian
        reduced = J.T @ self.a_matrix() @ J
        inverse, rank = linalg.pinvh(fisher, return_rank=True)
        if rank < fisher.shape[0]:
            logger.debug("Fisher matrix rank %d of %d", rank, fisher.shape[0])
        return CramerRaoResult(bound=float(np.trace(reduced @ inverse)), rank=int(rank),
                               retained=int(fisher.shape[0]))


def _class_members(space: MeasurementSpace) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    idx = class_index(space).ravel()
    order = np.argsort(idx, kind="stable")
    dim = space.d ** space.N
    return idx[order], order // dim, order % dim


def projected_kernels(xi: FiducialState, space: MeasurementSpace) -> np.ndarray:
    """V^dagger Delta^(+1)(m) V for every class, shape (N_M, d_sym, d_sym)."""
    d, N = space.d, space.N
    ensure_capacity(d, N)
    fid = xi.for_particles(N)
    key = GlobalCache.key("dsym", d, N, fid.fingerprint)

    def build():
        V = dicke_isometry(d, N)
        stacks = kernel_stacks(fid, KernelSign.PLUS)
        idx = class_index(space)
        dim = d ** N
        chunk = max(1, CHUNK_ENTRIES // (dim * dim))
        out = np.empty((len(space), V.shape[1], V.shape[1]), dtype=complex)
        for start in range(0, len(space), chunk):
            stop = min(start + chunk, len(space))
            tables = (idx[None, :, :] == np.arange(start, stop)[:, None, None]).astype(complex)
            full = expand_table(tables, stacks, d, N)
            out[start:stop] = np.einsum("ai,kab,bj->kij", V, full, V)
        residual = float(np.max(np.abs(out - out.conj().transpose(0, 2, 1)), initial=0.0))
        if residual > HERMITIAN_TOL:
            logger.warning("projected dual kernels have anti-Hermitian residual %.3e", residual)
        return out

    return GlobalCache.get_or_compute(key, build)


def collective_frame(space: MeasurementSpace, xi: FiducialState) -> TomographyFrame:
    d, N = space.d, space.N
    fid = xi.for_particles(N)
    key = GlobalCache.key("frame", "collective", d, N, fid.fingerprint)

    def build():
        phis = np.array([phi_vector(*space.representative_at(i), fid) for i in range(len(space))])
        weights = space.r_values / d ** N
        effects = weights[:, None, None] * np.einsum("ki,kj->kij", phis, phis.conj())
        duals = (d ** N / space.r_values)[:, None, None] * projected_kernels(fid, space)
        return TomographyFrame(effects, duals, d, N, labels=space.keys)

    return GlobalCache.get_or_compute(key, build)


def povm(space: MeasurementSpace, xi: FiducialState) -> dict[WeightVector, SymState]:
    frame = collective_frame(space, xi)
    return {m: SymState(e, space.d, space.N) for m, e in zip(space.keys, frame.effects)}


# ---------------------------------------------------------------------------
# Discrete functions g, C, f and the sum path for Delta_s
# ---------------------------------------------------------------------------

def discrete_g_table(space: MeasurementSpace) -> np.ndarray:
    """g[q, m] = sum over (alpha, beta) in m of omega^(alpha.delta - beta.gamma), (gamma, delta) in q."""
    d, N = space.d, space.N
    ensure_capacity(d, N)
    table = string_table(d, N)
    member_class, a_idx, b_idx = _class_members(space)
    reps = [space.representative_at(i) for i in range(len(space))]
    gammas = np.array([g.digits for g, _ in reps], dtype=np.int64)
    deltas = np.array([dl.digits for _, dl in reps], dtype=np.int64)
    phases = (table[a_idx] @ deltas.T - table[b_idx] @ gammas.T) % d
    values = omega_powers(d)[phases]  # (points, q)
    out = np.zeros((len(space), len(space)), dtype=complex)
    np.add.at(out.T, member_class, values)
    return out


def discrete_g(q: WeightVector, m: WeightVector, space: MeasurementSpace) -> complex:
    return complex(discrete_g_table(space)[space.position(q), space.position(m)])


def discrete_c(q: WeightVector, space: MeasurementSpace) -> np.ndarray:
    """C_{t,t'}(q) = sum over (gamma, delta) in q and lambda in t, lambda' in t' of <lambda|Z_gamma X_delta|lambda'>."""
    W = _dicke_indicator(space.d, space.N)
    return W.T @ d_m_operator(q, space).matrix @ W


def discrete_f(q: WeightVector, xi: FiducialState, space: MeasurementSpace) -> complex:
    """R_q / <xi|Z_gamma X_delta|xi> on a representative."""
    gamma, delta = space.representative(q)
    return space.multiplicity(q) / fiducial_matrix_element(xi, gamma, delta)


def delta_s_plus(m: WeightVector, xi: FiducialState, space: MeasurementSpace, method: str = "dense") -> SymState:
    """Delta^(+1)(m) compressed to the symmetric subspace.

    method "dense" projects the full kernel sum; "sums" evaluates
    d^-2N N_t N_t' sum_q g(q, m) f(q) C_tt'(q) / R_q, valid for a homogeneous fiducial.
    """
    d, N = space.d, space.N
    pos = space.position(m)
    if method == "dense":
        return SymState(projected_kernels(xi, space)[pos], d, N)
    if method != "sums":
        raise DomainError(f"unknown method {method!r}")
    fid = xi.for_particles(N)
    if not fid.is_homogeneous:
        raise DomainError("the g/C/f path needs the same fiducial on every particle")
    g = discrete_g_table(space)[:, pos]
    norms = np.array([b.normalization() for b in sym_basis_indices(d, N)])
    total = np.zeros((len(norms), len(norms)), dtype=complex)
    for qpos, q in enumerate(space.keys):
        if abs(g[qpos]) < 1e-14:
            continue
        total += g[qpos] * discrete_f(q, fid, space) * discrete_c(q, space) / space.multiplicities[qpos]
    return SymState(total * np.outer(norms, norms) / d ** (2 * N), d, N)


# ---------------------------------------------------------------------------
# Probabilities and reconstruction
# ---------------------------------------------------------------------------

def _as_frame(povm_or_frame, space: MeasurementSpace | None = None, xi: FiducialState | None = None) -> TomographyFrame:
    if isinstance(povm_or_frame, TomographyFrame):
        return povm_or_frame
    if isinstance(povm_or_frame, Mapping):
        effects = np.array([e.matrix for e in povm_or_frame.values()])
        first = next(iter(povm_or_frame.values()))
        return TomographyFrame(effects, np.zeros_like(effects), first.d, first.N, labels=tuple(povm_or_frame))
    raise DomainError("expected a TomographyFrame or a mapping of effects")


def probabilities(rho_s: SymState, povm_or_frame) -> dict:
    frame = _as_frame(povm_or_frame)
    return dict(zip(frame.labels, frame.probabilities(rho_s).tolist()))


def _sigma_vector(sigma, frame: TomographyFrame) -> np.ndarray:
    if isinstance(sigma, Mapping):
        missing = [m for m in frame.labels if m not in sigma]
        if missing:
            raise IncompleteDataError(f"{len(missing)} outcomes have no probability, first {missing[0]}")
        return np.array([float(sigma[m]) for m in frame.labels])
    arr = np.asarray(sigma, dtype=float)
    if arr.shape != (frame.size,):
        raise IncompleteDataError(f"expected {frame.size} probabilities, got {arr.size}")
    return arr


def reconstruct_symmetric(sigma, xi: FiducialState, space: MeasurementSpace) -> SymState:
    """d^N sum_m sigma_m R_m^-1 Delta_s(m)."""
    frame = collective_frame(space, xi)
    return frame.reconstruct(_sigma_vector(sigma, frame))


@dataclass(frozen=True)
class RedundancyReport:
    max_violation: float
    violations: np.ndarray
    constraints: int
    parameters: int


def redundancy_check(sigma, xi: FiducialState, space: MeasurementSpace) -> RedundancyReport:
    """sigma_q - Tr(E_q rho_rec(sigma)) over every outcome q."""
    frame = collective_frame(space, xi)
    vec = _sigma_vector(sigma, frame)
    violations = vec - frame.probabilities(frame.reconstruct(vec))
    return RedundancyReport(
        max_violation=float(np.max(np.abs(violations))),
        violations=violations,
        constraints=frame.size,
        parameters=frame.dim ** 2 - 1,
    )
