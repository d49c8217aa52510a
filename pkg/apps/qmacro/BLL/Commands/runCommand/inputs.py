"""
Parsing of the user-facing inputs shared by every command: fiducials,
named states, state files and count files.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from django.conf import settings

from apps.qmacro.BLL.Core.fiducial import FiducialState, load_fiducial
from apps.qmacro.BLL.Core.qudit_ops import DenseOperator, StateVector, ghz_state
from apps.qmacro.BLL.Core.sym_subspace import SymBasisIndex, dicke_state
from apps.qmacro.BLL.Core.zd_strings import WeightVector, label_names, require_prime
from backend.exceptions import DimensionError, DomainError, IncompleteDataError, UsageError
from utils.enums import StateKind
from utils.serialization_helpers import complex_matrix_from_pairs


@dataclass(frozen=True, eq=False)
class StateInput:
    """A parsed --state value: the density matrix, plus the vector for pure inputs."""

    kind: StateKind
    rho: DenseOperator
    vector: StateVector | None = None

    @property
    def is_pure(self) -> bool:
        return self.vector is not None


def check_sizes(d: int, N: int) -> None:
    if N < 1:
        raise UsageError("--n must be at least 1")
    try:
        require_prime(d)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def resolve_fiducial(path, d: int, N: int) -> FiducialState:
    """--fiducial, then QMACRO_FIDUCIAL, then the builtin SIC fiducial."""
    path = path or settings.QMACRO_FIDUCIAL
    if not path:
        return FiducialState.builtin(d, N)
    fid = load_fiducial(path, N)
    if fid.d != d:
        raise DimensionError(f"fiducial file {path} is for d={fid.d}, not {d}")
    return fid


def fiducial_payload(xi: FiducialState) -> dict:
    coeffs = np.asarray(xi.coefficients)
    return {"d": xi.d, "coefficients": np.stack([coeffs.real, coeffs.imag], axis=-1).tolist()}


def _from_vector(kind: StateKind, psi: StateVector) -> StateInput:
    return StateInput(kind, psi.projector(), psi)


def parse_dicke(text: str, d: int, N: int) -> SymBasisIndex:
    try:
        p = tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError as exc:
        raise UsageError(f"dicke occupations must be integers, got {text!r}") from exc
    if len(p) != d - 1:
        raise UsageError(f"dicke:<p> needs {d - 1} occupation(s) for d={d}, got {len(p)}")
    try:
        return SymBasisIndex(p, N)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def load_state_file(path, d: int, N: int) -> StateInput:
    """{"d", "N", "vector": [[re, im], ...]} or {"d", "N", "matrix": [[[re, im], ...], ...]}."""
    try:
        with Path(path).open(encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read state file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"state file {path} is not valid JSON: {exc}") from exc
    if int(payload.get("d", d)) != d or int(payload.get("N", N)) != N:
        raise DimensionError(f"state file is for d={payload.get('d')}, N={payload.get('N')}")
    if "vector" in payload:
        psi = StateVector(complex_matrix_from_pairs(payload["vector"]), d, N)
        return _from_vector(StateKind.FILE, psi)
    if "matrix" in payload:
        return StateInput(StateKind.FILE, DenseOperator(complex_matrix_from_pairs(payload["matrix"]), d, N))
    raise DomainError("state file needs a 'vector' or a 'matrix' entry")


def parse_state(text: str, d: int, N: int, xi: FiducialState) -> StateInput:
    """ghz | fiducial | dicke:<p-list> | file:<path>."""
    name, _, arg = text.partition(":")
    try:
        kind = StateKind(name.strip().lower())
    except ValueError as exc:
        raise UsageError(f"unknown state {text!r}; use ghz, fiducial, dicke:<p> or file:<path>") from exc
    if kind is StateKind.GHZ:
        return _from_vector(kind, ghz_state(d, N))
    if kind is StateKind.FIDUCIAL:
        return _from_vector(kind, xi.for_particles(N).vector())
    if not arg:
        raise UsageError(f"state {kind.value} needs an argument after ':'")
    if kind is StateKind.DICKE:
        return _from_vector(kind, dicke_state(parse_dicke(arg, d, N), d, N))
    return load_state_file(arg, d, N)


def parse_label(text: str, d: int) -> tuple[int, int]:
    """'k,l' or 'mkl' to a label tuple."""
    text = text.strip()
    if text.startswith("m") and len(text) == 3:
        parts = (text[1], text[2])
    else:
        parts = text.split(",")
    try:
        k, l = (int(x) for x in parts)
    except ValueError as exc:
        raise UsageError(f"cannot read label {text!r}; use k,l or mkl") from exc
    if not (0 <= k < d and 0 <= l < d) or (k, l) == (0, 0):
        raise UsageError(f"label ({k},{l}) is not a weight axis for d={d}")
    return k, l


def parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        values = tuple(int(float(x)) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise UsageError(f"{flag} expects a comma-separated list of integers") from exc
    if not values:
        raise UsageError(f"{flag} is empty")
    return values


def weight_key(key: str, d: int, N: int) -> WeightVector:
    try:
        return WeightVector(tuple(int(x) for x in key.split(",")), d, N)
    except ValueError as exc:
        raise DomainError(f"count key {key!r} is not a weight vector") from exc


def load_counts(path, d: int, N: int) -> tuple[dict[WeightVector, int], int]:
    """Count file: {"d", "N", "counts": {"m01,m10,...": n}} keyed by comma-joined weights."""
    try:
        with Path(path).open(encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read counts file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"counts file {path} is not valid JSON: {exc}") from exc
    if int(payload.get("d", d)) != d or int(payload.get("N", N)) != N:
        raise DimensionError(f"counts file is for d={payload.get('d')}, N={payload.get('N')}")
    raw = payload.get("counts")
    if not isinstance(raw, dict) or not raw:
        raise IncompleteDataError("counts file has no 'counts' table", columns=label_names(d))
    counts = {weight_key(k, d, N): int(v) for k, v in raw.items()}
    if any(v < 0 for v in counts.values()):
        raise DomainError("counts must be nonnegative")
    total = sum(counts.values())
    if total == 0:
        raise IncompleteDataError("counts file records zero trials")
    return counts, total
