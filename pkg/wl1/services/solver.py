"""Weighted l1 minimisation under the l2-ball and Dantzig-box constraint sets.

The Dantzig program and the equality-constrained (eps = 0) l2 program are
linear programs, solved with HiGHS through ``scipy.optimize.linprog`` on the
split x = p - q. The l2 program with eps > 0 is a second-order cone program
solved with CVXPY/Clarabel. Every returned point carries a weak-duality
certificate computed here, independent of what the backend claims.
"""
import enum
import logging
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np
from scipy.optimize import linprog

from wl1.config import Config
from wl1.models.signal import (NoiseSet, ProblemInstance, SparseSignal,
                               WeightVector, as_array, l1_on, weighted_l1_norm)
from wl1.monitoring.metrics import track_solve
from wl1.utils.errors import ParameterError, SolverError
from wl1.utils.validators import validate_positive_int

logger = logging.getLogger(__name__)

MAX_TOLERANCE = 1e-2
# HiGHS rejects feasibility tolerances below this.
HIGHS_MIN_TOLERANCE = 1e-10
# Active-set cutoffs tried in order when polishing a cone solution.
POLISH_THRESHOLDS = (1e-6, 1e-4, 1e-8)


class SolveStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    MAX_ITERS = "MaxIters"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class SolverOptions:
    feas_tol: float = 1e-8
    opt_tol: float = 1e-8
    max_iters: int = 50_000
    deterministic: bool = True

    def __post_init__(self):
        for name in ("feas_tol", "opt_tol"):
            value = float(getattr(self, name))
            if not 0.0 < value <= MAX_TOLERANCE:
                raise ParameterError(f"{name} must lie in (0, {MAX_TOLERANCE}], got {value}")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "max_iters", validate_positive_int("max_iters", self.max_iters))

    @classmethod
    def from_config(cls, config=Config, **overrides) -> "SolverOptions":
        """Defaults from a config class (WL1_FEAS_TOL, WL1_OPT_TOL, WL1_MAX_ITERS)"""
        values = {
            "feas_tol": config.FEAS_TOL,
            "opt_tol": config.OPT_TOL,
            "max_iters": config.MAX_ITERS,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


@dataclass(frozen=True)
class Certificate:
    """Primal residual, a valid lower bound on the optimum and the gap to it"""

    feas_violation: float
    objective: float
    dual_bound: float
    dual_violation: float = 0.0
    source: str = "none"

    @property
    def gap(self) -> float:
        return self.objective - self.dual_bound

    def holds(self, opts: SolverOptions) -> bool:
        return (self.feas_violation <= opts.feas_tol
                and self.gap <= opts.opt_tol * (1.0 + abs(self.objective)))

    def to_dict(self) -> dict:
        return {
            "feas_violation": self.feas_violation,
            "objective": self.objective,
            "dual_bound": self.dual_bound,
            "gap": self.gap,
            "dual_violation": self.dual_violation,
            "source": self.source,
        }


@dataclass(frozen=True)
class RecoveryReport:
    x_hat: SparseSignal
    objective: float
    feas_violation: float
    certificate: Certificate
    iterations: int
    status: SolveStatus
    program: NoiseSet = field(default=NoiseSet.L2_BALL)

    @property
    def gap(self) -> float:
        return self.certificate.gap

    def to_dict(self) -> dict:
        return {
            "program": self.program.value,
            "status": self.status.value,
            "x_hat": [float(v) for v in self.x_hat.entries],
            "objective": self.objective,
            "feas_violation": self.feas_violation,
            "gap": self.gap,
            "iterations": self.iterations,
            "certificate": self.certificate.to_dict(),
        }


def _weights_array(w, N):
    weights = w.weights if isinstance(w, WeightVector) else np.asarray(w, dtype=float)
    if weights.shape != (N,):
        raise ParameterError(f"weights have shape {weights.shape}, expected ({N},)")
    return weights


def _dual_pairing(inst: ProblemInstance):
    """(M, b) such that any dual vector v with |M^T v| <= w gives b.v - eps*||v|| <= optimum"""
    if inst.noise_set is NoiseSet.L2_BALL:
        return inst.A, inst.y
    gram = inst.A.T @ inst.A
    return gram, inst.A.T @ inst.y


def _dual_norm(inst, v):
    if inst.noise_set is NoiseSet.L2_BALL:
        return float(np.linalg.norm(v))
    return float(np.sum(np.abs(v)))


def _repair_dual(M, weights, v):
    """Project onto {(M^T v)_i = 0 where w_i = 0}, then shrink until |M^T v| <= w"""
    zero = weights <= 0.0
    if np.any(zero):
        M_zero = M[:, zero]
        v = v - M_zero @ np.linalg.lstsq(M_zero, v, rcond=None)[0]
    correlations = np.abs(M.T @ v)
    positive = (~zero) & (correlations > 0.0)
    if np.any(positive):
        scale = min(1.0, float(np.min(weights[positive] / correlations[positive])))
        v = v * scale
    return v


def _dual_candidates(inst, weights, x_hat, backend_duals):
    M, _ = _dual_pairing(inst)
    x = as_array(x_hat)
    candidates = [("zero", np.zeros(M.shape[0]))]
    for name, dual in backend_duals:
        if dual is not None and np.all(np.isfinite(dual)):
            candidates.append((name, dual))
            candidates.append((f"{name}-negated", -dual))

    scale = max(1.0, float(np.max(np.abs(x)))) if x.size else 1.0
    support = np.flatnonzero(np.abs(x) > 1e-7 * scale)
    if support.size:
        target = weights[support] * np.sign(x[support])
        kkt = np.linalg.lstsq(M[:, support].T, target, rcond=None)[0]
        candidates.append(("kkt", kkt))
        if inst.noise_set is NoiseSet.L2_BALL and inst.radius > 0.0:
            residual = inst.y - inst.A @ x
            size = float(np.linalg.norm(residual))
            if size > 0.0:
                direction = residual / size
                basis = M[:, support].T @ direction
                denominator = float(basis @ basis)
                if denominator > 0.0:
                    multiplier = float(basis @ target) / denominator
                    candidates.append(("kkt-ball", multiplier * direction))
    return candidates


def optimality_certificate(inst: ProblemInstance, w, x_hat, backend_duals=()) -> Certificate:
    """Feasibility residual, best valid dual lower bound and gap for x_hat

    ``backend_duals`` are (name, vector) pairs from the solver; their sign
    convention does not matter since both signs are tried.
    """
    x = as_array(x_hat)
    weights = _weights_array(w, inst.N)
    M, b = _dual_pairing(inst)
    objective = weighted_l1_norm(x, weights)
    feas_violation = inst.residual_violation(x)

    best = None
    for name, candidate in _dual_candidates(inst, weights, x, backend_duals):
        dual = _repair_dual(M, weights, np.asarray(candidate, dtype=float))
        bound = float(b @ dual) - inst.radius * _dual_norm(inst, dual)
        violation = float(np.max(np.abs(M.T @ dual) - weights, initial=0.0))
        violation = max(violation, 0.0)
        if best is None or bound > best[1]:
            best = (name, bound, violation)

    name, bound, violation = best
    return Certificate(
        feas_violation=feas_violation,
        objective=objective,
        dual_bound=bound,
        dual_violation=violation,
        source=name,
    )


def _highs_options(opts: SolverOptions):
    tolerance = max(HIGHS_MIN_TOLERANCE, min(opts.feas_tol, opts.opt_tol) * 1e-2)
    return {
        "maxiter": opts.max_iters,
        "primal_feasibility_tolerance": tolerance,
        "dual_feasibility_tolerance": tolerance,
        "presolve": True,
    }


def _solve_lp(inst: ProblemInstance, weights, opts: SolverOptions):
    """x = p - q with p, q >= 0; returns (x or None, status, iterations, duals)"""
    A, y, eps = inst.A, inst.y, inst.radius
    N = inst.N
    c = np.concatenate([weights, weights])
    if inst.noise_set is NoiseSet.DANTZIG_BOX:
        gram = A.T @ A
        correlation = A.T @ y
        A_ub = np.block([[gram, -gram], [-gram, gram]])
        b_ub = np.concatenate([correlation + eps, eps - correlation])
        result = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=(0, None),
                         method="highs", options=_highs_options(opts))
    else:
        result = linprog(c, A_eq=np.hstack([A, -A]), b_eq=y, bounds=(0, None),
                         method="highs", options=_highs_options(opts))

    duals = []
    ineqlin = getattr(result, "ineqlin", None)
    if ineqlin is not None and getattr(ineqlin, "marginals", None) is not None \
            and len(ineqlin.marginals) == 2 * N:
        marginals = np.asarray(ineqlin.marginals, dtype=float)
        duals.append(("lp-dual", marginals[:N] - marginals[N:]))
    eqlin = getattr(result, "eqlin", None)
    if eqlin is not None and getattr(eqlin, "marginals", None) is not None \
            and len(eqlin.marginals) == inst.n:
        duals.append(("lp-dual", np.asarray(eqlin.marginals, dtype=float)))

    iterations = int(getattr(result, "nit", 0) or 0)
    x = None if result.x is None else result.x[:N] - result.x[N:]
    if result.status == 0:
        status = SolveStatus.OPTIMAL
    elif result.status in (2, 3):
        # nonnegative costs on p, q >= 0 rule out unboundedness
        status = SolveStatus.INFEASIBLE
    elif result.status in (1, 4) and x is not None:
        status = SolveStatus.MAX_ITERS
    else:
        raise SolverError(f"linear program failed: {result.message}")
    return x, status, iterations, duals


def available_backends():
    """Backend per program; the cone entry is None when Clarabel is not installed"""
    cone = "clarabel" if cp.CLARABEL in cp.installed_solvers() else None
    return {"lp": "highs", "cone": cone}


def _solve_cone(inst: ProblemInstance, weights, opts: SolverOptions):
    x = cp.Variable(inst.N)
    ball = cp.norm(inst.y - inst.A @ x, 2) <= inst.radius
    problem = cp.Problem(cp.Minimize(cp.sum(cp.multiply(weights, cp.abs(x)))), [ball])
    try:
        problem.solve(
            solver=cp.CLARABEL,
            max_iter=opts.max_iters,
            tol_gap_abs=opts.opt_tol * 1e-1,
            tol_gap_rel=opts.opt_tol * 1e-1,
            tol_feas=opts.feas_tol * 1e-1,
        )
    except cp.error.SolverError as e:
        raise SolverError(f"cone program failed: {e}") from e

    iterations = 0
    if problem.solver_stats is not None and problem.solver_stats.num_iters is not None:
        iterations = int(problem.solver_stats.num_iters)

    if problem.status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        return None, SolveStatus.INFEASIBLE, iterations, []
    if x.value is None:
        raise SolverError(f"cone program returned no point (status {problem.status})")

    x_value = np.asarray(x.value, dtype=float).reshape(-1)
    duals = []
    if ball.dual_value is not None:
        residual = inst.y - inst.A @ x_value
        size = float(np.linalg.norm(residual))
        multiplier = float(np.asarray(ball.dual_value).reshape(-1)[0])
        if size > 0.0:
            duals.append(("cone-dual", multiplier * residual / size))
    # an inaccurate optimum still has to pass the certificate in _finish
    solved = problem.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE)
    status = SolveStatus.OPTIMAL if solved else SolveStatus.MAX_ITERS
    return x_value, status, iterations, duals


def _polish_ball(inst: ProblemInstance, weights, x, threshold):
    """Exact KKT point of the l2-ball program on the active set of x, or None

    S holds the entries of x above threshold * max|x| plus every zero-weight
    entry. With G = A_S^T A_S and ws = w_S * sign(x_S), the point
    x_S = x_LS - mu G^+ ws with ||y - A_S x_S|| = eps satisfies
    A_S^T r = mu ws, so u = r / mu is a dual point with zero gap when the
    signs survive and |A^T u| <= w off S.
    """
    entries = as_array(x)
    peak = float(np.max(np.abs(entries), initial=0.0))
    active = (np.abs(entries) > threshold * peak) | (weights <= 0.0)
    if peak == 0.0 or not np.any(active & (weights > 0.0)):
        return None
    A_S = inst.A[:, active]
    signs = np.sign(entries[active])
    target = weights[active] * signs

    x_ls = np.linalg.lstsq(A_S, inst.y, rcond=None)[0]
    slack = inst.radius ** 2 - float(np.sum((inst.y - A_S @ x_ls) ** 2))
    direction = np.linalg.pinv(A_S.T @ A_S) @ target
    curvature = float(target @ direction)
    if slack <= 0.0 or curvature <= 0.0:
        return None
    mu = float(np.sqrt(slack / curvature))
    x_S = x_ls - mu * direction

    weighted = weights[active] > 0.0
    if np.any(np.sign(x_S[weighted]) != signs[weighted]):
        return None
    residual = inst.y - A_S @ x_S
    dual = residual / mu
    if not np.allclose(A_S.T @ dual, target, rtol=1e-9, atol=1e-12):
        return None
    polished = np.zeros(inst.N)
    polished[active] = x_S
    return polished, dual


def _polished(inst, weights, x, duals, opts, certificate):
    """Replace a cone solution by its polished KKT point when that certifies"""
    for threshold in POLISH_THRESHOLDS:
        polished = _polish_ball(inst, weights, x, threshold)
        if polished is None:
            continue
        x_polished, dual = polished
        candidate = optimality_certificate(
            inst, weights, x_polished, [*duals, ("kkt-polished", dual)])
        if candidate.holds(opts):
            return x_polished, candidate
    return x, certificate


def _finish(inst, weights, x, status, iterations, duals, opts) -> RecoveryReport:
    if x is None:
        x = np.zeros(inst.N)
    certificate = optimality_certificate(inst, weights, x, duals)
    if (inst.noise_set is NoiseSet.L2_BALL and inst.radius > 0.0
            and status is not SolveStatus.INFEASIBLE and not certificate.holds(opts)):
        x, certificate = _polished(inst, weights, x, duals, opts, certificate)
    if status is SolveStatus.OPTIMAL and not certificate.holds(opts):
        logger.warning(
            "Backend optimum failed certification",
            extra={
                "event": "certificate_failed",
                "program": inst.noise_set.value,
                "feas_violation": certificate.feas_violation,
                "gap": certificate.gap,
            },
        )
        status = SolveStatus.MAX_ITERS
    report = RecoveryReport(
        x_hat=SparseSignal(x),
        objective=certificate.objective,
        feas_violation=certificate.feas_violation,
        certificate=certificate,
        iterations=iterations,
        status=status,
        program=inst.noise_set,
    )
    logger.debug(
        "Solve completed",
        extra={
            "event": "solve_completed",
            "program": inst.noise_set.value,
            "status": status.value,
            "objective": report.objective,
            "gap": report.gap,
            "iterations": iterations,
        },
    )
    return report


@track_solve("l2")
def solve_weighted_bp(inst: ProblemInstance, w, opts: SolverOptions = None) -> RecoveryReport:
    """minimize ||x||_{1,w} subject to ||y - Ax||_2 <= eps"""
    opts = opts or SolverOptions.from_config()
    if inst.noise_set is not NoiseSet.L2_BALL:
        raise ParameterError("solve_weighted_bp needs an l2-ball instance")
    weights = _weights_array(w, inst.N)
    if inst.radius == 0.0:
        result = _solve_lp(inst, weights, opts)
    else:
        result = _solve_cone(inst, weights, opts)
    return _finish(inst, weights, *result, opts)


@track_solve("ds")
def solve_weighted_ds(inst: ProblemInstance, w, opts: SolverOptions = None) -> RecoveryReport:
    """minimize ||x||_{1,w} subject to ||A^T (y - Ax)||_inf <= eps"""
    opts = opts or SolverOptions.from_config()
    if inst.noise_set is not NoiseSet.DANTZIG_BOX:
        raise ParameterError("solve_weighted_ds needs a Dantzig-box instance")
    weights = _weights_array(w, inst.N)
    return _finish(inst, weights, *_solve_lp(inst, weights, opts), opts)


def solve(inst: ProblemInstance, w, opts: SolverOptions = None) -> RecoveryReport:
    """Dispatch on the instance's noise set"""
    if inst.noise_set is NoiseSet.L2_BALL:
        return solve_weighted_bp(inst, w, opts)
    return solve_weighted_ds(inst, w, opts)


def cone_diagnostic(x, x_hat, T0, T_tilde, omega, k):
    """(lhs, rhs, holds) for the cone inequality satisfied by h = x_hat - x

    lhs = ||h_{T0^c}||_1
    rhs = omega ||h_{T0}||_1 + (1 - omega) ||h_{(T0 u T~) \\ (T~ n T0)}||_1
          + 2 (omega ||x_{T0^c}||_1 + (1 - omega) ||x_{T~^c n T0^c}||_1)
    """
    validate_positive_int("k", k)
    x = as_array(x)
    h = as_array(x_hat) - x
    N = x.shape[0]
    T0 = set(int(i) for i in T0)
    T_tilde = set(int(i) for i in T_tilde)
    off_support = [i for i in range(N) if i not in T0]
    outside_both = [i for i in off_support if i not in T_tilde]
    mixed = sorted((T0 | T_tilde) - (T_tilde & T0))

    lhs = l1_on(h, off_support)
    rhs = (omega * l1_on(h, sorted(T0))
           + (1.0 - omega) * l1_on(h, mixed)
           + 2.0 * (omega * l1_on(x, off_support) + (1.0 - omega) * l1_on(x, outside_both)))
    return lhs, rhs, lhs <= rhs + 1e-8
