"""
Finite-statistics simulation of the collective and product-SIC protocols:
multinomial sampling, linear-inversion estimates, Cramer-Rao bounds and the
lambda / sqrt(M) fit.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from apps.qmacro.BLL.Core.fiducial import FiducialState
from apps.qmacro.BLL.Core.macro_space import MeasurementSpace, build_measurement_space
from apps.qmacro.BLL.Core.phase_space import kernel_stacks
from apps.qmacro.BLL.Core.qudit_ops import DenseOperator
from apps.qmacro.BLL.Core.sym_subspace import (
    CramerRaoResult, SymState, TomographyFrame, collective_frame, dicke_isometry, sym_dimension,
)
from apps.qmacro.BLL.Core.zd_strings import ensure_capacity, string_table
from backend.exceptions import DomainError, FitError, UndefinedEstimateError
from utils.cache_helper import GlobalCache
from utils.enums import Ensemble, KernelSign, Protocol, SpaceMethod

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-8
STATE_STREAM = 0


@dataclass(frozen=True)
class ExperimentConfig:
    d: int
    N: int
    trials: tuple[int, ...] = (100, 1000, 10000)
    ensemble: Ensemble = Ensemble.PURE
    ensemble_size: int = 200
    seed: int = 0
    protocols: tuple[Protocol, ...] = (Protocol.COLLECTIVE,)
    repetitions: int = 1

    def __post_init__(self):
        object.__setattr__(self, "trials", tuple(int(m) for m in self.trials))
        object.__setattr__(self, "ensemble", Ensemble(self.ensemble))
        object.__setattr__(self, "protocols", tuple(Protocol(p) for p in self.protocols))
        if not self.trials or min(self.trials) < 1:
            raise DomainError("every trial count M must be at least 1")
        if self.ensemble_size < 1:
            raise DomainError("ensemble size must be at least 1")
        if self.repetitions < 1:
            raise DomainError("repetitions must be at least 1")

    def to_dict(self) -> dict:
        return {
            "d": self.d, "N": self.N, "trials": list(self.trials), "ensemble": self.ensemble.value,
            "ensemble_size": self.ensemble_size, "seed": self.seed,
            "protocols": [p.value for p in self.protocols], "repetitions": self.repetitions,
        }

    @classmethod
    def from_dict(cls, payload: Mapping) -> ExperimentConfig:
        return cls(
            d=int(payload["d"]), N=int(payload["N"]), trials=tuple(payload["trials"]),
            ensemble=payload.get("ensemble", "pure"), ensemble_size=int(payload.get("ensemble_size", 200)),
            seed=int(payload.get("seed", 0)), protocols=tuple(payload.get("protocols", ("collective",))),
            repetitions=int(payload.get("repetitions", 1)),
        )


@dataclass(frozen=True, eq=False)
class SampleRecord:
    counts: np.ndarray
    M: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if np.any(counts < 0) or int(counts.sum()) != self.M:
            raise DomainError(f"counts must be nonnegative and sum to M={self.M}")
        object.__setattr__(self, "counts", counts)

    @property
    def frequencies(self) -> np.ndarray:
        if self.M == 0:
            raise UndefinedEstimateError("no trials recorded, frequencies are undefined")
        return self.counts / self.M


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _probability_vector(sigma) -> np.ndarray:
    p = np.array(list(sigma.values()) if isinstance(sigma, Mapping) else sigma, dtype=float)
    if abs(p.sum() - 1.0) > NORMALIZATION_TOL:
        raise DomainError(f"probabilities sum to {p.sum():.12g}, not 1")
    if np.min(p, initial=0.0) < -1e-12:
        raise DomainError(f"negative probability {np.min(p):.3e}")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def sample_counts(sigma, M: int, seed=None) -> SampleRecord:
    """Multinomial draw of M outcomes; deterministic for a fixed seed."""
    p = _probability_vector(sigma)
    if M < 0:
        raise DomainError("M must be nonnegative")
    if M == 0:
        return SampleRecord(np.zeros_like(p, dtype=np.int64), 0)
    return SampleRecord(_rng(seed).multinomial(M, p), M)


def estimate_state(record: SampleRecord, xi: FiducialState, space: MeasurementSpace,
                   frame: TomographyFrame | None = None) -> SymState:
    if record.M == 0:
        raise UndefinedEstimateError("cannot estimate a state from zero trials")
    frame = frame or collective_frame(space, xi)
    return frame.reconstruct(record.frequencies)


def _matrix(rho) -> np.ndarray:
    if isinstance(rho, (SymState, DenseOperator)):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


def hs_distance_sq(rho, rho_est) -> float:
    """Tr[(rho - rho_est)^2] for Hermitian arguments."""
    diff = _matrix(rho) - _matrix(rho_est)
    return float(np.real(np.vdot(diff, diff)))


def a_matrix(xi: FiducialState, space: MeasurementSpace) -> np.ndarray:
    """d^2N (R_p R_q)^-1 Tr(Delta_s(p) Delta_s(q))."""
    return collective_frame(space, xi).a_matrix()


def cramer_rao_mse(rho_s: SymState, xi: FiducialState, space: MeasurementSpace, M: int,
                   frame: TomographyFrame | None = None) -> CramerRaoResult:
    frame = frame or collective_frame(space, xi)
    return frame.cramer_rao(rho_s, M)


@dataclass(frozen=True)
class LambdaFit:
    lam: float
    slope: float


def lambda_fit(results: Sequence[tuple[float, float]]) -> LambdaFit:
    """Fit log sqrt(MSE) = log lambda + slope log M."""
    data = np.array(results, dtype=float).reshape(-1, 2)
    if len(np.unique(data[:, 0])) < 3:
        raise FitError("lambda fit needs at least three distinct M values")
    if np.any(data[:, 0] <= 0) or np.any(data[:, 1] <= 0) or not np.all(np.isfinite(data)):
        raise FitError("lambda fit needs positive finite M and MSE values")
    slope, intercept = np.polyfit(np.log(data[:, 0]), 0.5 * np.log(data[:, 1]), 1)
    return LambdaFit(lam=float(np.exp(intercept)), slope=float(slope))


def random_symmetric_state(kind: Ensemble, d: int, N: int, seed=None) -> SymState:
    """Pure: isotropic unit vector in H_sym. Mixed: G G^dagger / Tr(G G^dagger), G complex Gaussian."""
    kind = Ensemble(kind)
    rng = _rng(seed)
    dim = sym_dimension(d, N)
    if kind is Ensemble.PURE:
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        return SymState(np.outer(v, v.conj()), d, N)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return SymState(rho / np.trace(rho).real, d, N)


def sic_frame(xi: FiducialState, d: int, N: int) -> TomographyFrame:
    """Product-SIC protocol on H_sym: effects V^dagger d^-N Delta^(-1) V, duals d^N V^dagger Delta^(+1) V."""
    ensure_capacity(d, 2 * N)
    fid = xi.for_particles(N)
    key = GlobalCache.key("frame", "sic", d, N, fid.fingerprint)

    def build():
        V = dicke_isometry(d, N)
        minus = kernel_stacks(fid, KernelSign.MINUS)
        plus = kernel_stacks(fid, KernelSign.PLUS)
        table = string_table(d, N)
        effects, duals, labels = [], [], []
        for alpha in table:
            for beta in table:
                sites = alpha * d + beta
                e = _site_kron(minus, sites)
                g = _site_kron(plus, sites)
                effects.append(V.T @ e @ V / d ** N)
                duals.append(d ** N * (V.T @ g @ V))
                labels.append((tuple(alpha.tolist()), tuple(beta.tolist())))
        return TomographyFrame(np.array(effects), np.array(duals), d, N, labels=tuple(labels))

    return GlobalCache.get_or_compute(key, build)


def _site_kron(stacks, sites) -> np.ndarray:
    out = stacks[0][sites[0]]
    for stack, s in zip(stacks[1:], sites[1:]):
        out = np.kron(out, stack[s])
    return out


def _frame_for(protocol: Protocol, xi: FiducialState, d: int, N: int) -> TomographyFrame:
    if Protocol(protocol) is Protocol.SIC:
        return sic_frame(xi, d, N)
    return collective_frame(build_measurement_space(d, N, SpaceMethod.ORBITS), xi)


def empirical_mse(rho_s: SymState, frame: TomographyFrame, M: int, rng: np.random.Generator,
                  repetitions: int = 1) -> float:
    sigma = frame.probabilities(rho_s)
    errors = [
        hs_distance_sq(rho_s, frame.reconstruct(sample_counts(sigma / sigma.sum(), M, rng).frequencies))
        for _ in range(repetitions)
    ]
    return float(np.mean(errors))


def sic_baseline_mse(rho_s: SymState, xi: FiducialState, M: int, seed=None, repetitions: int = 1) -> float:
    return empirical_mse(rho_s, sic_frame(xi, rho_s.d, rho_s.N), M, _rng(seed), repetitions)


def state_seed(master: int, index: int, stream: int) -> np.random.SeedSequence:
    """Independent stream per (state index, stream) so results do not depend on scheduling."""
    return np.random.SeedSequence(master, spawn_key=(index, stream))


def simulate_state(config: ExperimentConfig, index: int, xi: FiducialState | None = None) -> dict:
    """MSE and Cramer-Rao bound at every M, for every protocol, for one ensemble member."""
    fid = xi or FiducialState.builtin(config.d, config.N)
    rho = random_symmetric_state(config.ensemble, config.d, config.N,
                                 np.random.default_rng(state_seed(config.seed, index, STATE_STREAM)))
    out = {"index": index, "protocols": {}}
    for stream, protocol in enumerate(config.protocols, start=1):
        frame = _frame_for(protocol, fid, config.d, config.N)
        rng = np.random.default_rng(state_seed(config.seed, index, stream))
        out["protocols"][protocol.value] = {
            "mse": [empirical_mse(rho, frame, M, rng, config.repetitions) for M in config.trials],
            "crb": [frame.cramer_rao(rho, M).bound for M in config.trials],
        }
    return out


@dataclass
class BenchmarkRecord:
    d: int
    N: int
    protocol: str
    M: int
    mean_mse: float
    std_mse: float
    mean_crb: float
    seed: int
    ensemble: str
    lam: float | None = None
    slope: float | None = None


@dataclass
class BenchmarkResult:
    config: ExperimentConfig
    records: list[BenchmarkRecord] = field(default_factory=list)
    fits: dict[str, LambdaFit] = field(default_factory=dict)
    crb_fits: dict[str, LambdaFit] = field(default_factory=dict)

    def to_records(self) -> list[dict]:
        rows = []
        for r in self.records:
            rows.append({
                "d": r.d, "N": r.N, "protocol": r.protocol, "M": r.M,
                "mean_mse": r.mean_mse, "std_mse": r.std_mse, "mean_crb": r.mean_crb,
                "lambda": r.lam, "slope": r.slope, "seed": r.seed, "ensemble": r.ensemble,
            })
        return rows


def summarize(config: ExperimentConfig, per_state: Sequence[dict]) -> BenchmarkResult:
    """Aggregate per-state results in state-index order."""
    ordered = sorted(per_state, key=lambda item: item["index"])
    result = BenchmarkResult(config)
    for protocol in config.protocols:
        name = protocol.value
        mse = np.array([item["protocols"][name]["mse"] for item in ordered])
        crb = np.array([item["protocols"][name]["crb"] for item in ordered])
        means = mse.mean(axis=0)
        fit = lambda_fit(list(zip(config.trials, means))) if len(set(config.trials)) >= 3 else None
        crb_fit = lambda_fit(list(zip(config.trials, crb.mean(axis=0)))) if fit else None
        if fit:
            result.fits[name] = fit
            result.crb_fits[name] = crb_fit
        for j, M in enumerate(config.trials):
            result.records.append(BenchmarkRecord(
                d=config.d, N=config.N, protocol=name, M=M,
                mean_mse=float(means[j]), std_mse=float(mse[:, j].std()), mean_crb=float(crb[:, j].mean()),
                seed=config.seed, ensemble=config.ensemble.value,
                lam=fit.lam if fit else None, slope=fit.slope if fit else None,
            ))
    return result


def run_benchmark(config: ExperimentConfig, xi: FiducialState | None = None) -> BenchmarkResult:
    """Sequential in-process run; the bench_mse command fans the same work out as tasks."""
    return summarize(config, [simulate_state(config, i, xi) for i in range(config.ensemble_size)])
