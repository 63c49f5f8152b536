"""Signals, support estimates, weights and problem instances.

Indices are 0-based inside the library. The JSON/CSV formats in
``wl1.models.io`` are 1-based.
"""
import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from wl1.utils.errors import ParameterError
from wl1.utils.validators import (near_integer, validate_index_set,
                                  validate_matrix, validate_nonnegative,
                                  validate_positive_int, validate_unit_interval,
                                  validate_vector)

logger = logging.getLogger(__name__)


def _frozen(array):
    array = np.array(array, dtype=float, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class SparseSignal:
    """A real signal of length N"""

    entries: np.ndarray

    def __post_init__(self):
        entries = validate_vector("entries", self.entries)
        if entries.shape[0] < 1:
            raise ParameterError("a signal needs at least one entry")
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def N(self) -> int:
        return int(self.entries.shape[0])

    @classmethod
    def zeros(cls, N: int) -> "SparseSignal":
        return cls(np.zeros(validate_positive_int("N", N)))

    def support(self) -> tuple:
        return support_of(self.entries)

    def __add__(self, other):
        return SparseSignal(self.entries + as_array(other))

    def __sub__(self, other):
        return SparseSignal(self.entries - as_array(other))

    def __len__(self):
        return self.N


def as_array(x) -> np.ndarray:
    """Entries of a SparseSignal, or x itself as a float array"""
    if isinstance(x, SparseSignal):
        return x.entries
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class SupportEstimate:
    """Support estimate T~ with its statistics against a reference support T0"""

    indices: tuple
    k: int
    rho: float
    alpha: float
    beta: float
    n_correct: int = 0
    n_wrong: int = 0

    def __post_init__(self):
        k = validate_positive_int("k", self.k)
        object.__setattr__(self, "k", k)
        indices = tuple(sorted(int(i) for i in self.indices))
        if len(set(indices)) != len(indices):
            raise ParameterError("support estimate contains duplicate indices")
        object.__setattr__(self, "indices", indices)

        size = self.rho * k
        if near_integer(size) != len(indices):
            raise ParameterError(
                f"|T~| = {len(indices)} does not equal rho*k = {size}")
        correct = self.alpha * self.rho * k
        wrong = self.beta * self.rho * k
        if near_integer(correct) is None or near_integer(wrong) is None:
            raise ParameterError(
                f"alpha*rho*k = {correct} and beta*rho*k = {wrong} must be integers")
        if abs(self.alpha + self.beta - 1.0) > 1e-12:
            raise ParameterError("alpha + beta must equal 1")
        object.__setattr__(self, "n_correct", near_integer(correct))
        object.__setattr__(self, "n_wrong", near_integer(wrong))

    @classmethod
    def from_reference(cls, T_tilde, T0, k: int) -> "SupportEstimate":
        """Build T~ and derive (rho, alpha, beta) from the reference support T0"""
        rho, alpha, beta = support_stats(T0, T_tilde, k)
        return cls(indices=tuple(T_tilde), k=k, rho=rho, alpha=alpha, beta=beta)

    @property
    def size(self) -> int:
        return len(self.indices)


class NoiseSet(str, enum.Enum):
    """Constraint set for the residual y - Ax"""

    L2_BALL = "l2"
    DANTZIG_BOX = "ds"

    @classmethod
    def parse(cls, value) -> "NoiseSet":
        if isinstance(value, cls):
            return value
        normalized = str(value).strip().lower()
        aliases = {"l2": cls.L2_BALL, "l2ball": cls.L2_BALL,
                   "ds": cls.DANTZIG_BOX, "dantzig": cls.DANTZIG_BOX,
                   "dantzigbox": cls.DANTZIG_BOX}
        if normalized not in aliases:
            raise ParameterError(f"unknown noise set {value!r}, expected 'l2' or 'ds'")
        return aliases[normalized]


@dataclass(frozen=True)
class WeightVector:
    """Weights omega on T~ and 1 elsewhere"""

    weights: np.ndarray
    omega: float
    support: tuple = field(default=())

    def __post_init__(self):
        weights = validate_vector("weights", self.weights)
        if np.any(weights < 0.0) or np.any(weights > 1.0):
            raise ParameterError("weights must lie in [0, 1]")
        object.__setattr__(self, "weights", _frozen(weights))
        object.__setattr__(self, "omega", validate_unit_interval("omega", self.omega))
        object.__setattr__(self, "support", tuple(int(i) for i in self.support))

    @property
    def N(self) -> int:
        return int(self.weights.shape[0])


@dataclass(frozen=True)
class ProblemInstance:
    """Sensing matrix, measurements and the residual constraint set"""

    A: np.ndarray
    y: np.ndarray
    noise_set: NoiseSet = NoiseSet.L2_BALL
    radius: float = 0.0

    def __post_init__(self):
        A = validate_matrix("A", self.A)
        y = validate_vector("y", self.y, length=A.shape[0])
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "y", _frozen(y))
        object.__setattr__(self, "noise_set", NoiseSet.parse(self.noise_set))
        object.__setattr__(self, "radius", validate_nonnegative("radius", self.radius))

    @property
    def n(self) -> int:
        return int(self.A.shape[0])

    @property
    def N(self) -> int:
        return int(self.A.shape[1])

    def zero_columns(self) -> tuple:
        return tuple(int(j) for j in np.flatnonzero(~np.any(self.A != 0.0, axis=0)))

    def residual_violation(self, x) -> float:
        """How far x is outside the constraint set (0 when feasible)"""
        residual = self.y - self.A @ as_array(x)
        if self.noise_set is NoiseSet.L2_BALL:
            size = float(np.linalg.norm(residual))
        else:
            size = float(np.max(np.abs(self.A.T @ residual)))
        return max(0.0, size - self.radius)


def best_k_term(x, k: int):
    """Split x into its k largest-magnitude entries and the rest"""
    entries = as_array(x)
    N = entries.shape[0]
    k = validate_positive_int("k", k)
    if k > N:
        raise ParameterError(f"k = {k} exceeds signal length {N}")

    # stable sort on -|x| keeps the lower index first among ties
    order = np.argsort(-np.abs(entries), kind="stable")
    head = np.zeros(N)
    keep = order[:k]
    head[keep] = entries[keep]
    tail = entries.copy()
    tail[keep] = 0.0
    return SparseSignal(head), SparseSignal(tail)


def top_k_support(x, k: int) -> tuple:
    """T0: the support of the best k-term approximation (nonzero entries only)"""
    head, _ = best_k_term(x, k)
    return head.support()


def support_stats(T0, T_tilde, k: int):
    """(rho, alpha, beta) of T~ relative to T0 and sparsity k"""
    k = validate_positive_int("k", k)
    T0 = set(int(i) for i in T0)
    T_tilde = set(int(i) for i in T_tilde)
    if len(T0) > k:
        raise ParameterError(f"|T0| = {len(T0)} exceeds k = {k}")
    if not T_tilde:
        return 0.0, 0.0, 1.0
    rho = len(T_tilde) / k
    alpha = len(T_tilde & T0) / len(T_tilde)
    return rho, alpha, 1.0 - alpha


def build_weights(T_tilde, omega: float, N: int) -> WeightVector:
    """Weight vector with omega on T~ and 1 elsewhere"""
    N = validate_positive_int("N", N)
    omega = validate_unit_interval("omega", omega)
    support = validate_index_set("T_tilde", T_tilde, N)
    weights = np.ones(N)
    if support:
        weights[list(support)] = omega
    return WeightVector(weights=weights, omega=omega, support=support)


def weighted_l1_norm(x, w) -> float:
    """sum_i w_i |x_i|"""
    entries = as_array(x)
    weights = w.weights if isinstance(w, WeightVector) else np.asarray(w, dtype=float)
    if entries.shape != weights.shape:
        raise ParameterError(
            f"signal length {entries.shape} does not match weights {weights.shape}")
    return float(np.sum(weights * np.abs(entries)))


def complement(indices, N: int) -> tuple:
    """Indices of range(N) not in indices"""
    present = set(int(i) for i in indices)
    return tuple(i for i in range(N) if i not in present)


def l1_on(x, indices) -> float:
    """||x_S||_1 for the index set S"""
    entries = as_array(x)
    indices = list(indices)
    if not indices:
        return 0.0
    return float(np.sum(np.abs(entries[indices])))


def support_of(x, tol: float = 0.0) -> tuple:
    """Indices with |x_i| > tol"""
    return tuple(int(i) for i in np.flatnonzero(np.abs(as_array(x)) > tol))
