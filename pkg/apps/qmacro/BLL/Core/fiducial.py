"""
Fiducial states, discrete coherent states and fiducial matrix elements.

Single-particle conventions, with c the fiducial coefficients:
    <l| Z^a X^b |xi> = omega^(a l) c_(l-b)
    <xi| Z^g X^delta |xi> = sum_l conj(c_l) omega^(g l) c_(l-delta)
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from apps.qmacro.BLL.Core.qudit_ops import StateVector, kron_all, omega_powers
from apps.qmacro.BLL.Core.zd_strings import DString, ensure_capacity, require_prime
from backend.exceptions import DimensionError, DomainError, UnsupportedDimensionError

logger = logging.getLogger(__name__)

NORM_TOL = 1e-10


def zeta() -> complex:
    return (math.sqrt(3) - 1) / math.sqrt(2) * np.exp(1j * math.pi / 4)


def builtin_coefficients(d: int) -> np.ndarray:
    if d == 2:
        z = zeta()
        return np.array([1.0, z], dtype=complex) / math.sqrt(1 + abs(z) ** 2)
    if d == 3:
        return np.array([1.0, np.exp(1j * math.pi / 3), 0.0], dtype=complex) / math.sqrt(2)
    raise UnsupportedDimensionError(
        f"no builtin fiducial for d={d}; supply coefficients with --fiducial", d=d
    )


@dataclass(frozen=True, eq=False)
class FiducialState:
    """Product fiducial |xi> = |xi_1> x ... x |xi_N>; one coefficient row per particle."""

    coefficients: np.ndarray  # shape (N, d)
    d: int

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coefficients, dtype=complex))
        require_prime(self.d)
        if c.shape[1] != self.d:
            raise DimensionError(f"fiducial rows have {c.shape[1]} coefficients, expected d={self.d}")
        norms = np.linalg.norm(c, axis=1)
        if np.any(np.abs(norms - 1.0) > NORM_TOL):
            raise DomainError(f"fiducial particles must be normalized, norms {norms}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def N(self) -> int:
        return self.coefficients.shape[0]

    @property
    def is_homogeneous(self) -> bool:
        return bool(np.allclose(self.coefficients, self.coefficients[0], atol=NORM_TOL, rtol=0))

    def single(self, i: int = 0) -> np.ndarray:
        return self.coefficients[i]

    def replicate(self, N: int) -> FiducialState:
        if self.N != 1 and not self.is_homogeneous:
            raise DomainError("only a single-particle or homogeneous fiducial can be replicated")
        return FiducialState(np.tile(self.coefficients[:1], (N, 1)), self.d)

    def for_particles(self, N: int) -> FiducialState:
        return self if self.N == N else self.replicate(N)

    def vector(self) -> StateVector:
        ensure_capacity(self.d, self.N)
        return StateVector(kron_all(list(self.coefficients)), self.d, self.N)

    @cached_property
    def fingerprint(self) -> str:
        rounded = np.round(self.coefficients, 12)
        digest = hashlib.sha1(rounded.tobytes() + str(self.coefficients.shape).encode())
        return digest.hexdigest()[:16]

    @classmethod
    def builtin(cls, d: int, N: int = 1) -> FiducialState:
        return cls(np.tile(builtin_coefficients(d), (N, 1)), d)


def builtin_fiducial(d: int) -> FiducialState:
    return FiducialState.builtin(d, 1)


def load_fiducial(path, N: int | None = None) -> FiducialState:
    """Read a fiducial config: {"d": 3, "coefficients": [[re, im], ...]} or one list per particle."""
    with Path(path).open(encoding="utf-8") as fh:
        config = json.load(fh)
    return fiducial_from_config(config, N)


def fiducial_from_config(config: dict, N: int | None = None) -> FiducialState:
    try:
        d = int(config["d"])
        raw = np.asarray(config["coefficients"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed fiducial config: {exc}") from exc
    if raw.shape[-1] != 2:
        raise DomainError("fiducial coefficients must be [re, im] pairs")
    coeffs = raw[..., 0] + 1j * raw[..., 1]
    fid = FiducialState(coeffs, d)
    if N is not None:
        if fid.N not in (1, N):
            raise DimensionError(f"config lists {fid.N} particles, expected {N}")
        fid = fid.for_particles(N)
    return fid


def single_coherent_matrix(c: np.ndarray, d: int) -> np.ndarray:
    """Rows |a,b> = Z^a X^b |xi> for every (a, b); row index a*d + b."""
    powers = omega_powers(d)
    l = np.arange(d)
    out = np.empty((d * d, d), dtype=complex)
    for a in range(d):
        for b in range(d):
            out[a * d + b] = powers[(a * l) % d] * c[(l - b) % d]
    return out


def coherent_state(xi: FiducialState, alpha: DString, beta: DString) -> StateVector:
    if alpha.d != xi.d or beta.d != xi.d or alpha.N != beta.N:
        raise DimensionError("coherent state labels disagree with the fiducial")
    fid = xi.for_particles(alpha.N)
    ensure_capacity(fid.d, fid.N)
    d = fid.d
    factors = [
        single_coherent_matrix(fid.single(i), d)[a * d + b]
        for i, (a, b) in enumerate(zip(alpha.digits, beta.digits))
    ]
    return StateVector(kron_all(factors), d, fid.N)


def single_matrix_element(c: np.ndarray, g: int, delta: int, d: int) -> complex:
    l = np.arange(d)
    return complex(np.sum(c.conj() * omega_powers(d)[(g * l) % d] * c[(l - delta) % d]))


def single_element_table(c: np.ndarray, d: int) -> np.ndarray:
    """<xi|Z^g X^delta|xi> for every (g, delta), shape (d, d)."""
    return np.array([[single_matrix_element(c, g, dl, d) for dl in range(d)] for g in range(d)])


def fiducial_matrix_element(xi: FiducialState, gamma: DString, delta: DString) -> complex:
    fid = xi.for_particles(gamma.N)
    if gamma.d != fid.d or delta.d != fid.d or gamma.N != delta.N:
        raise DimensionError("labels disagree with the fiducial")
    value = 1.0 + 0j
    for i, (g, dl) in enumerate(zip(gamma.digits, delta.digits)):
        value *= single_matrix_element(fid.single(i), g, dl, fid.d)
    return value


@dataclass(frozen=True)
class SicReport:
    d: int
    max_deviation: float
    overlaps: np.ndarray

    @property
    def is_sic(self) -> bool:
        return self.max_deviation < 1e-10


def sic_check(xi: FiducialState | Sequence[complex]) -> SicReport:
    """Max |(|<a,b|a',b'>|^2) - (1 + d delta)/(1 + d)| over all d^4 pairs."""
    if isinstance(xi, FiducialState):
        if xi.N != 1 and not xi.is_homogeneous:
            raise DomainError("sic_check takes a single-particle fiducial")
        c, d = xi.single(0), xi.d
    else:
        c = np.asarray(xi, dtype=complex)
        d = c.shape[0]
    states = single_coherent_matrix(c, d)
    overlaps = np.abs(states.conj() @ states.T) ** 2
    target = (1 + d * np.eye(d * d)) / (1 + d)
    deviation = float(np.max(np.abs(overlaps - target)))
    if deviation > 1e-10:
        logger.warning("fiducial for d=%d misses the SIC condition by %.3e", d, deviation)
    return SicReport(d=d, max_deviation=deviation, overlaps=overlaps)
