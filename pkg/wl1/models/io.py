"""On-disk formats. Index sets are 1-based here and 0-based in memory."""
import csv
import json
import logging
from pathlib import Path

import numpy as np

from wl1.models.signal import SparseSignal, WeightVector, as_array, build_weights
from wl1.utils.errors import ParameterError
from wl1.utils.validators import validate_matrix

logger = logging.getLogger(__name__)


def signal_to_json(x) -> dict:
    entries = as_array(x)
    return {"n": int(entries.shape[0]), "entries": [float(v) for v in entries]}


def signal_from_json(data) -> SparseSignal:
    if isinstance(data, list):
        return SparseSignal(data)
    entries = data.get("entries")
    if entries is None:
        raise ParameterError("signal JSON needs an 'entries' list")
    if "n" in data and int(data["n"]) != len(entries):
        raise ParameterError(f"signal JSON says n={data['n']} but has {len(entries)} entries")
    return SparseSignal(entries)


def indices_to_json(indices) -> dict:
    return {"indices": [int(i) + 1 for i in sorted(indices)]}


def indices_from_json(data) -> tuple:
    values = data["indices"] if isinstance(data, dict) else data
    indices = [int(i) - 1 for i in values]
    if any(i < 0 for i in indices):
        raise ParameterError("index JSON is 1-based, found an index below 1")
    return tuple(sorted(indices))


def weights_to_json(w: WeightVector) -> dict:
    return {
        "n": w.N,
        "omega": w.omega,
        **indices_to_json(w.support),
        "weights": [float(v) for v in w.weights],
    }


def weights_from_json(data) -> WeightVector:
    """Accept either {omega, indices, n} or an explicit weights list"""
    if "omega" in data and "indices" in data and "n" in data:
        return build_weights(indices_from_json(data), data["omega"], int(data["n"]))
    if "weights" in data:
        weights = np.asarray(data["weights"], dtype=float)
        off_one = np.flatnonzero(weights != 1.0)
        omega = float(weights[off_one[0]]) if off_one.size else 1.0
        return WeightVector(weights=weights, omega=omega, support=tuple(off_one))
    raise ParameterError("weights JSON needs {omega, indices, n} or 'weights'")


def read_matrix_csv(path) -> np.ndarray:
    """Row-major matrix, one row per line, no header"""
    with open(path, newline="") as handle:
        try:
            rows = [[float(value) for value in row] for row in csv.reader(handle) if row]
        except ValueError as e:
            raise ParameterError(f"{path} has a non-numeric entry: {e}") from e
    if not rows:
        raise ParameterError(f"{path} contains no rows")
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        raise ParameterError(f"{path} has ragged rows (widths {sorted(widths)})")
    return validate_matrix(str(path), rows)


def write_matrix_csv(path, A) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        for row in np.atleast_2d(np.asarray(A, dtype=float)):
            writer.writerow([repr(float(v)) for v in row])
    return path


def read_vector_csv(path) -> np.ndarray:
    """A vector stored one value per line or as a single row"""
    matrix = read_matrix_csv(path)
    return matrix.reshape(-1)


def read_json(path):
    with open(path) as handle:
        return json.load(handle)


def write_json(path, data) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as handle:
        json.dump(data, handle, indent=2, sort_keys=False)
        handle.write("\n")
    return path
