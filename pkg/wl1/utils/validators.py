import logging
import math

import numpy as np

from wl1.utils.errors import ParameterError

logger = logging.getLogger(__name__)

# Relative distance below which a float is taken to be the nearby integer.
INTEGER_TOLERANCE = 1e-9


def near_integer(value: float, tol: float = INTEGER_TOLERANCE):
    """Return the integer closest to value if it is within tol, else None"""
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"expected a finite number, got {value}")
    nearest = round(value)
    if abs(value - nearest) <= tol * max(1.0, abs(value)):
        return int(nearest)
    return None


def ceil_int(value: float) -> int:
    """Ceiling that does not round 16.000000000000004 up to 17"""
    snapped = near_integer(value)
    if snapped is not None:
        return snapped
    return int(math.ceil(value))


def require_integer(name: str, value: float) -> int:
    """Return value as an int, raising if it is not integral"""
    snapped = near_integer(float(value))
    if snapped is None:
        raise ParameterError(f"{name} must be an integer, got {value}")
    return snapped


def validate_positive_int(name: str, value) -> int:
    """Check that value is an integer >= 1"""
    value = require_integer(name, value)
    if value < 1:
        raise ParameterError(f"{name} must be a positive integer, got {value}")
    return value


def validate_unit_interval(name: str, value: float) -> float:
    """Check that value lies in [0, 1]"""
    value = float(value)
    if not math.isfinite(value) or value < 0.0 or value > 1.0:
        raise ParameterError(f"{name} must lie in [0, 1], got {value}")
    return value


def validate_nonnegative(name: str, value: float) -> float:
    """Check that value is finite and >= 0"""
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise ParameterError(f"{name} must be a nonnegative real, got {value}")
    return value


def validate_positive(name: str, value: float) -> float:
    """Check that value is finite and > 0"""
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ParameterError(f"{name} must be a positive real, got {value}")
    return value


def validate_vector(name: str, values, length: int = None) -> np.ndarray:
    """Return a finite 1-d float array, optionally of a fixed length"""
    array = np.asarray(values, dtype=float)
    if array.ndim != 1:
        raise ParameterError(f"{name} must be one-dimensional, got shape {array.shape}")
    if length is not None and array.shape[0] != length:
        raise ParameterError(
            f"{name} must have length {length}, got {array.shape[0]}")
    if not np.all(np.isfinite(array)):
        raise ParameterError(f"{name} has non-finite entries")
    return array


def validate_matrix(name: str, values) -> np.ndarray:
    """Return a finite 2-d float array"""
    array = np.asarray(values, dtype=float)
    if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
        raise ParameterError(f"{name} must be a nonempty matrix, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ParameterError(f"{name} has non-finite entries")
    zero_columns = np.flatnonzero(~np.any(array != 0.0, axis=0))
    if zero_columns.size:
        # Permitted, only recorded.
        logger.debug(f"{name} has {zero_columns.size} all-zero columns")
    return array


def validate_index_set(name: str, indices, N: int) -> tuple:
    """Return a sorted duplicate-free tuple of 0-based indices inside range(N)"""
    if indices is None:
        return ()
    result = sorted(int(i) for i in indices)
    if len(set(result)) != len(result):
        raise ParameterError(f"{name} contains duplicate indices")
    if result and (result[0] < 0 or result[-1] >= N):
        raise ParameterError(f"{name} has indices outside 0..{N - 1}")
    return tuple(result)
