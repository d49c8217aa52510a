import csv
import json
from dataclasses import asdict, is_dataclass
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from pathlib import Path

import numpy as np


def serialize_for_export(data):
    """Convert numpy, complex, Decimal and other non-JSON types to JSON-friendly formats.

    Complex numbers become [re, im] pairs; arrays become nested lists in row-major order.
    """
    if isinstance(data, dict):
        return {_key(k): serialize_for_export(v) for k, v in data.items()}
    elif isinstance(data, (list, tuple)):
        return [serialize_for_export(item) for item in data]
    elif isinstance(data, np.ndarray):
        return serialize_for_export(data.tolist())
    elif isinstance(data, (complex, np.complexfloating)):
        return [float(data.real), float(data.imag)]
    elif isinstance(data, np.integer):
        return int(data)
    elif isinstance(data, (np.floating, Decimal, Fraction)):
        return float(data)
    elif isinstance(data, np.bool_):
        return bool(data)
    elif isinstance(data, Enum):
        return data.value
    elif isinstance(data, Path):
        return str(data)
    elif is_dataclass(data) and not isinstance(data, type):
        return serialize_for_export(asdict(data))
    return data


def _key(k):
    if isinstance(k, tuple):
        return ",".join(str(x) for x in k)
    return str(k) if not isinstance(k, str) else k


def complex_matrix_from_pairs(rows) -> np.ndarray:
    """Inverse of the [re, im] pair encoding for a matrix or vector."""
    arr = np.asarray(rows, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        json.dump(serialize_for_export(payload), fh, indent=2, sort_keys=False)
        fh.write("\n")
    return path


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value
