"""An explicit matrix on which weighted l1 fails just above the RIP threshold.

Only d = 1 geometries are supported. The construction builds a unit vector
x1 = (x0 - eta0) / ||x0 - eta0||, the projection-type map

    A = sqrt(1 + sqrt((t-1)/(t-1+gamma^2))) (I - x1 x1^T),

a k-sparse x0 and a decoy eta0 with A x0 = A eta0 and a smaller weighted
norm, so the weighted program with y = A x0 never returns x0.

Block layout (0-based, n_correct = alpha*rho*k, n_est = rho*k):

    [0, k - n_correct)                      ones of x0
    [k - n_correct, k - n_correct + n_est)  middle block, zero in x0
    [k - n_correct + n_est, k + n_est)      ones of x0
    after that                              zeros of x0

The support estimate is [k, k + n_est): the end of the middle block plus
the trailing ones.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from wl1.models.signal import (NoiseSet, ProblemInstance, SparseSignal,
                               build_weights, weighted_l1_norm)
from wl1.services.bounds import GeometryParams
from wl1.services.rip import exact_ric
from wl1.services.solver import SolverOptions, solve_weighted_bp
from wl1.utils.errors import (DomainError, ParameterError,
                              UnsupportedGeometryError)
from wl1.utils.rng import STREAM_NOISE, make_rng
from wl1.utils.validators import (ceil_int, near_integer, require_integer,
                                  validate_positive, validate_positive_int)

logger = logging.getLogger(__name__)

DEFAULT_NOISE_LEVELS = (1e-1, 1e-2, 1e-3)
INVARIANT_TOL = 1e-10


def minimal_t(gamma: float) -> float:
    """Smallest t for which the construction applies (d = 1)"""
    gamma = float(gamma)
    if not 0.0 < gamma <= 1.0:
        raise ParameterError(f"gamma must lie in (0, 1], got {gamma}")
    root = math.sqrt(1.0 - gamma * gamma)
    return 1.0 + (1.0 - root) ** 2 / (gamma * gamma + 2.0 * (1.0 - root))


def scale_factor(t: float, gamma: float) -> float:
    """c = 1 + sqrt((t-1)/(t-1+gamma^2)); the map is sqrt(c) (I - x1 x1^T)"""
    return 1.0 + math.sqrt((t - 1.0) / (t - 1.0 + gamma * gamma))


def m_prime(t: float, gamma: float, k: int) -> float:
    root = math.sqrt(1.0 - gamma * gamma)
    value = (1.0 + root) / (gamma * gamma) * (
        t - 1.0 + math.sqrt((t - 1.0) * (t - 1.0 + gamma * gamma))) * k
    snapped = near_integer(value)
    return float(snapped) if snapped is not None else value


@dataclass
class Counterexample:
    A: np.ndarray
    x0: SparseSignal
    eta0: SparseSignal
    x1: SparseSignal
    m_prime: float
    m: int
    T_tilde: tuple
    k: int
    t: float
    omega: float
    rho: float
    alpha: float
    gamma: float
    epsilon: float = None
    x0_weighted_norm: float = field(default=0.0)
    eta0_weighted_norm: float = field(default=0.0)

    @property
    def N(self) -> int:
        return self.x0.N

    @property
    def norm_ordering_holds(self) -> bool:
        """||eta0||_{1,w} < ||x0||_{1,w}; can fail for omega < 1"""
        return self.eta0_weighted_norm < self.x0_weighted_norm

    def weights(self):
        return build_weights(self.T_tilde, self.omega, self.N)

    def to_dict(self, include_matrix=True) -> dict:
        data = {
            "k": self.k,
            "t": self.t,
            "omega": self.omega,
            "rho": self.rho,
            "alpha": self.alpha,
            "gamma": self.gamma,
            "epsilon": self.epsilon,
            "N": self.N,
            "m_prime": self.m_prime,
            "m": self.m,
            "T_tilde": [i + 1 for i in self.T_tilde],
            "x0": [float(v) for v in self.x0.entries],
            "eta0": [float(v) for v in self.eta0.entries],
            "x1": [float(v) for v in self.x1.entries],
            "x0_weighted_norm": self.x0_weighted_norm,
            "eta0_weighted_norm": self.eta0_weighted_norm,
            "norm_ordering_holds": self.norm_ordering_holds,
        }
        if include_matrix:
            data["A"] = [[float(v) for v in row] for row in self.A]
        return data

    @classmethod
    def from_dict(cls, data, A=None) -> "Counterexample":
        """Rebuild from to_dict output; A is recomputed from x1 when absent"""
        x1 = np.asarray(data["x1"], dtype=float)
        if A is None:
            A = data.get("A")
        if A is None:
            A = operator_matrix(x1, data["t"], data["gamma"])
        ce = cls(
            A=np.asarray(A, dtype=float),
            x0=SparseSignal(data["x0"]),
            eta0=SparseSignal(data["eta0"]),
            x1=SparseSignal(x1),
            m_prime=float(data["m_prime"]),
            m=int(data["m"]),
            T_tilde=tuple(int(i) - 1 for i in data["T_tilde"]),
            k=int(data["k"]),
            t=float(data["t"]),
            omega=float(data["omega"]),
            rho=float(data["rho"]),
            alpha=float(data["alpha"]),
            gamma=float(data["gamma"]),
            epsilon=data.get("epsilon"),
        )
        _attach_norms(ce)
        return ce


def operator_matrix(x1, t, gamma) -> np.ndarray:
    x1 = np.asarray(x1, dtype=float)
    return math.sqrt(scale_factor(t, gamma)) * (np.eye(x1.shape[0]) - np.outer(x1, x1))


def _attach_norms(ce):
    w = ce.weights()
    ce.x0_weighted_norm = weighted_l1_norm(ce.x0, w)
    ce.eta0_weighted_norm = weighted_l1_norm(ce.eta0, w)


def construct_counterexample(k, t, omega, rho=1.0, alpha=0.5, epsilon=None, N=None) -> Counterexample:
    k = validate_positive_int("k", k)
    g = GeometryParams(t=t, omega=omega, rho=rho, alpha=alpha)
    if abs(g.d - 1.0) > 1e-12:
        raise UnsupportedGeometryError(
            f"construction needs d = 1, got d = {g.d} (omega={omega}, rho={rho}, alpha={alpha})")
    gamma = g.gamma
    floor_t = minimal_t(gamma)
    if g.t < floor_t * (1.0 - 1e-12):
        raise ParameterError(f"t = {g.t} is below the minimal t = {floor_t} for gamma = {gamma}")
    if epsilon is not None:
        epsilon = validate_positive("epsilon", epsilon)
        if k < 6.0 / epsilon * (1.0 - 1e-12):
            raise ParameterError(f"k = {k} must be at least 6/epsilon = {6.0 / epsilon}")

    n_est = require_integer("rho*k", rho * k)
    n_correct = require_integer("alpha*rho*k", alpha * rho * k)

    mp = m_prime(g.t, gamma, k)
    m = ceil_int(mp) - 1
    if m < 1:
        raise ParameterError(f"m' = {mp} leaves no integer m >= 1 below it")
    minimal_N = k + max(m, n_est)
    N = minimal_N if N is None else validate_positive_int("N", N)
    if N < minimal_N:
        raise ParameterError(f"N = {N} is below the block layout size {minimal_N}")

    head = k - n_correct
    middle_end = head + n_est
    x0 = np.zeros(N)
    x0[:head] = 1.0
    x0[middle_end:middle_end + n_correct] = 1.0

    level = k / mp
    eta0 = np.zeros(N)
    if m > n_est:
        eta0[head:middle_end] = level
        eta0[k + n_est:k + m] = level
    else:
        eta0[head:head + m] = level

    x1 = (x0 - eta0) / math.sqrt(k + m * k * k / (mp * mp))
    ce = Counterexample(
        A=operator_matrix(x1, g.t, gamma),
        x0=SparseSignal(x0),
        eta0=SparseSignal(eta0),
        x1=SparseSignal(x1),
        m_prime=mp,
        m=m,
        T_tilde=tuple(range(k, k + n_est)),
        k=k,
        t=g.t,
        omega=g.omega,
        rho=g.rho,
        alpha=g.alpha,
        gamma=gamma,
        epsilon=epsilon,
    )
    _attach_norms(ce)

    check = verify_counterexample(ce)
    failed = [name for name, ok in check["checks"].items() if not ok]
    if failed:
        raise DomainError(f"constructed counterexample fails {', '.join(failed)}")
    if not ce.norm_ordering_holds:
        logger.warning(
            "Weighted norm ordering fails for this geometry",
            extra={"event": "norm_ordering_failed", "omega": ce.omega, "alpha": ce.alpha,
                   "x0_norm": ce.x0_weighted_norm, "eta0_norm": ce.eta0_weighted_norm},
        )
    logger.info(
        "Counterexample constructed",
        extra={"event": "counterexample_constructed", "k": k, "t": g.t, "N": N,
               "m_prime": mp, "m": m},
    )
    return ce


def verify_counterexample(ce: Counterexample) -> dict:
    """Residuals of every structural invariant, and the norm ordering (reported only)"""
    A = np.asarray(ce.A, dtype=float)
    x0, eta0, x1 = ce.x0.entries, ce.eta0.entries, ce.x1.entries
    c = scale_factor(ce.t, ce.gamma)
    projector = np.eye(ce.N) - np.outer(x1, x1)
    residuals = {
        "unit x1": abs(float(np.linalg.norm(x1)) - 1.0),
        "kernel": float(np.linalg.norm(A @ x1)),
        "equal measurements": float(np.linalg.norm(A @ (x0 - eta0))),
        "gram structure": float(np.max(np.abs(A.T @ A - c * projector))),
    }
    m_ok = ce.m < ce.m_prime <= ce.m + 1 and ceil_int(ce.m_prime) - 1 == ce.m
    checks = {
        "unit x1": residuals["unit x1"] <= 1e-12,
        "kernel": residuals["kernel"] <= 1e-12,
        "equal measurements": residuals["equal measurements"] <= INVARIANT_TOL,
        "gram structure": residuals["gram structure"] <= INVARIANT_TOL,
        "m bracket": bool(m_ok),
        "k-sparse x0": int(np.count_nonzero(x0)) <= ce.k,
    }
    return {
        "residuals": residuals,
        "checks": checks,
        "norm_ordering_holds": ce.norm_ordering_holds,
        "x0_weighted_norm": ce.x0_weighted_norm,
        "eta0_weighted_norm": ce.eta0_weighted_norm,
    }


def verify_ric_bound(ce: Counterexample, epsilon: float, budget=None):
    """(delta, bound, ok) with delta the exact delta_ceil(tk) of ce.A"""
    epsilon = validate_positive("epsilon", epsilon)
    result = exact_ric(ce.A, ce.t * ce.k, budget=budget)
    bound = math.sqrt((ce.t - 1.0) / (ce.t - 1.0 + ce.gamma ** 2)) + epsilon
    return result.delta, bound, result.delta <= bound + INVARIANT_TOL


@dataclass(frozen=True)
class FailureReport:
    x_hat: SparseSignal
    error: float
    objective: float
    x0_weighted_norm: float
    eta0_weighted_norm: float
    status: str
    noisy_errors: tuple = ()

    @property
    def objective_below_decoy(self) -> bool:
        return self.objective <= self.eta0_weighted_norm + 1e-8

    @property
    def recovered(self) -> bool:
        return self.error <= 1e-6

    @property
    def min_noisy_error(self) -> float:
        return min((error for _, error in self.noisy_errors), default=math.nan)

    def to_dict(self) -> dict:
        return {
            "x_hat": [float(v) for v in self.x_hat.entries],
            "error": self.error,
            "objective": self.objective,
            "x0_weighted_norm": self.x0_weighted_norm,
            "eta0_weighted_norm": self.eta0_weighted_norm,
            "objective_below_decoy": self.objective_below_decoy,
            "recovered": self.recovered,
            "status": self.status,
            "noisy_errors": [{"noise_norm": level, "error": error}
                             for level, error in self.noisy_errors],
        }


def demonstrate_failure(ce: Counterexample, noise_kind=NoiseSet.L2_BALL, opts: SolverOptions = None,
                        noise_levels=DEFAULT_NOISE_LEVELS, seed: int = 0) -> FailureReport:
    """Solve with y = A x0 (and y = A x0 + z for shrinking z) and report the miss"""
    if NoiseSet.parse(noise_kind) is not NoiseSet.L2_BALL:
        raise ParameterError("the failure demonstration covers the l2 noise set only")
    opts = opts or SolverOptions.from_config()
    w = ce.weights()
    x0 = ce.x0.entries

    noiseless = ProblemInstance(A=ce.A, y=ce.A @ x0, noise_set=NoiseSet.L2_BALL, radius=0.0)
    report = solve_weighted_bp(noiseless, w, opts)
    error = float(np.linalg.norm(report.x_hat.entries - x0))

    noisy_errors = []
    for index, level in enumerate(noise_levels):
        direction = make_rng(seed, index, STREAM_NOISE).standard_normal(ce.N)
        z = level * direction / np.linalg.norm(direction)
        inst = ProblemInstance(A=ce.A, y=ce.A @ x0 + z, noise_set=NoiseSet.L2_BALL, radius=level)
        noisy = solve_weighted_bp(inst, w, opts)
        noisy_errors.append((float(level), float(np.linalg.norm(noisy.x_hat.entries - x0))))

    failure = FailureReport(
        x_hat=report.x_hat,
        error=error,
        objective=report.objective,
        x0_weighted_norm=ce.x0_weighted_norm,
        eta0_weighted_norm=ce.eta0_weighted_norm,
        status=report.status.value,
        noisy_errors=tuple(noisy_errors),
    )
    logger.info(
        "Failure demonstration completed",
        extra={"event": "failure_demonstrated", "error": error,
               "objective": report.objective, "decoy_norm": ce.eta0_weighted_norm},
    )
    return failure
