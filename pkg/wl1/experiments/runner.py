"""Recovery sweeps and the certified error-bound check.

Trials run on a thread pool; each trial draws its own instance from
(seed, trial_id) and records are merged in trial order, so the written
files do not depend on the worker count.
"""
import contextvars
import csv
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from wl1.config import get_workers
from wl1.experiments.ensembles import (gen_gaussian_instance,
                                       gen_support_estimate, trial_noise)
from wl1.models.io import write_json
from wl1.models.signal import ProblemInstance, build_weights
from wl1.monitoring.metrics import trials_total
from wl1.monitoring.tracing import trace_run
from wl1.services.bounds import best_certified_t
from wl1.services.rip import exact_ric
from wl1.services.solver import SolverOptions, SolveStatus, solve
from wl1.utils.errors import ParameterError, Wl1Error
from wl1.utils.validators import ceil_int

logger = logging.getLogger(__name__)

CSV_HEADER = ("trial", "omega", "alpha", "error", "success", "status", "bound_rhs", "margin")
SUCCESS_TOL = 1e-6
BOUND_TOL = 1e-6
# Largest sizes for which every delta_tk on the t grid is enumerated.
BOUND_CHECK_MAX_N = 10
BOUND_CHECK_MAX_COLUMNS = 14


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    omega: float
    alpha: float
    error: float
    success: bool
    status: str
    bound_rhs: float = None
    margin: float = None
    t: float = None
    delta: float = None
    # Not written to files.
    wall_time: float = field(default=0.0, compare=False)

    @property
    def certified(self) -> bool:
        return self.bound_rhs is not None

    @property
    def violates_bound(self) -> bool:
        return self.certified and not self.error <= self.bound_rhs + BOUND_TOL


@dataclass
class ExperimentResult:
    records: list
    cells: list
    files: list = field(default_factory=list)

    @property
    def certified(self) -> list:
        return [record for record in self.records if record.certified]

    @property
    def violations(self) -> list:
        return [record for record in self.records if record.violates_bound]


def _solve_cell(inst, x_true, T_tilde, omega, opts):
    """(error, success, status, wall_time) for one weighted solve"""
    start_time = time.perf_counter()
    try:
        report = solve(inst, build_weights(T_tilde, omega, inst.N), opts)
    except Wl1Error as e:
        logger.warning(
            f"Trial solve failed: {e}",
            extra={"event": "trial_failed", "omega": omega, "error_type": type(e).__name__},
        )
        trials_total.labels(status="Error").inc()
        return math.nan, False, "Error", time.perf_counter() - start_time

    error = float(np.linalg.norm(report.x_hat.entries - x_true))
    success = (report.status is SolveStatus.OPTIMAL
               and error <= SUCCESS_TOL * max(1.0, float(np.linalg.norm(x_true))))
    trials_total.labels(status=report.status.value).inc()
    return error, success, report.status.value, time.perf_counter() - start_time


def _instance(cfg, trial_id):
    A, x_true, T0 = gen_gaussian_instance(cfg, trial_id)
    z, eps = trial_noise(cfg, A, trial_id)
    inst = ProblemInstance(A=A, y=A @ x_true + z, noise_set=cfg.noise_set, radius=eps)
    return inst, x_true, T0


def _recovery_trial(cfg, trial_id, opts):
    inst, x_true, T0 = _instance(cfg, trial_id)
    records = []
    for alpha in cfg.alphas:
        estimate = gen_support_estimate(T0, alpha, cfg.rho, cfg.N, cfg.seed, trial_id, k=cfg.k)
        for omega in cfg.omegas:
            error, success, status, wall_time = _solve_cell(
                inst, x_true, estimate.indices, omega, opts)
            records.append(TrialRecord(trial=trial_id, omega=omega, alpha=alpha, error=error,
                                       success=success, status=status, wall_time=wall_time))
    return records


def _exact_deltas(A, k, t_grid):
    """delta_ceil(tk) for every t on the grid that fits inside A"""
    deltas = {}
    for t in t_grid:
        if ceil_int(t * k) > A.shape[1]:
            continue
        deltas[t] = exact_ric(A, t * k, workers=1).delta
    return deltas


def _bound_check_trial(cfg, trial_id, opts):
    inst, x_true, T0 = _instance(cfg, trial_id)
    deltas = _exact_deltas(inst.A, cfg.k, cfg.t_grid)
    # the guarantee presumes the true signal is feasible
    feasible = inst.residual_violation(x_true) <= 0.0
    records = []
    for alpha in cfg.alphas:
        estimate = gen_support_estimate(T0, alpha, cfg.rho, cfg.N, cfg.seed, trial_id, k=cfg.k)
        for omega in cfg.omegas:
            best = None
            if feasible:
                best = best_certified_t(deltas, omega, estimate.rho, estimate.alpha, cfg.k,
                                        inst.radius, x_true, T0, estimate.indices,
                                        inst.noise_set)
            error, success, status, wall_time = _solve_cell(
                inst, x_true, estimate.indices, omega, opts)
            if best is None:
                records.append(TrialRecord(trial=trial_id, omega=omega, alpha=alpha, error=error,
                                           success=success, status=status, wall_time=wall_time))
                continue
            t, delta, _, bound = best
            record = TrialRecord(trial=trial_id, omega=omega, alpha=alpha, error=error,
                                 success=success, status=status, bound_rhs=bound,
                                 margin=bound - error, t=t, delta=delta, wall_time=wall_time)
            if record.violates_bound:
                logger.error(
                    "Certified error bound violated",
                    extra={"event": "bound_violated", "trial": trial_id, "omega": omega,
                           "alpha": alpha, "error": error, "bound": bound},
                )
            records.append(record)
    return records


def _run_trials(cfg, trial_fn, opts, workers):
    workers = workers or get_workers()
    if workers <= 1:
        batches = [trial_fn(cfg, trial_id, opts) for trial_id in range(cfg.trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            # workers inherit the caller's run id
            futures = [executor.submit(contextvars.copy_context().run, trial_fn, cfg, trial_id, opts)
                       for trial_id in range(cfg.trials)]
            batches = [future.result() for future in futures]
    return [record for batch in batches for record in batch]


def run_recovery_experiment(cfg, opts: SolverOptions = None, workers=None, write=True) -> ExperimentResult:
    """Per-(omega, alpha) success rates and errors over cfg.trials random instances"""
    opts = opts or SolverOptions.from_config()
    with trace_run("recovery_experiment", trials=cfg.trials, n=cfg.n, N=cfg.N, k=cfg.k):
        records = _run_trials(cfg, _recovery_trial, opts, workers)
        result = ExperimentResult(records=records, cells=aggregate_records(records))
        if write:
            result.files = _write_outputs(cfg, result)
    return result


def run_certified_bound_check(cfg, opts: SolverOptions = None, workers=None, write=True) -> ExperimentResult:
    """Solve tiny instances and compare each certified cell with its error bound"""
    if cfg.n > BOUND_CHECK_MAX_N or cfg.N > BOUND_CHECK_MAX_COLUMNS:
        raise ParameterError(
            f"bound check needs n <= {BOUND_CHECK_MAX_N} and N <= {BOUND_CHECK_MAX_COLUMNS}, "
            f"got n={cfg.n}, N={cfg.N}")
    opts = opts or SolverOptions.from_config()
    with trace_run("certified_bound_check", trials=cfg.trials, n=cfg.n, N=cfg.N, k=cfg.k):
        records = _run_trials(cfg, _bound_check_trial, opts, workers)
        result = ExperimentResult(records=records, cells=aggregate_records(records))
        logger.info(
            "Bound check finished",
            extra={"event": "bound_check_finished", "certified": len(result.certified),
                   "violations": len(result.violations)},
        )
        if write:
            result.files = _write_outputs(cfg, result)
    return result


def _finite_or_none(value):
    if value is None or not math.isfinite(value):
        return None
    return value


def aggregate_records(records) -> list:
    """One summary dict per (omega, alpha) cell, sorted by alpha then omega"""
    cells = {}
    for record in records:
        cells.setdefault((record.alpha, record.omega), []).append(record)

    summary = []
    for (alpha, omega), group in sorted(cells.items()):
        errors = [record.error for record in group if math.isfinite(record.error)]
        successes = sum(1 for record in group if record.success)
        certified = [record for record in group if record.certified]
        summary.append({
            "omega": omega,
            "alpha": alpha,
            "trials": len(group),
            "successes": successes,
            "success_rate": successes / len(group),
            "mean_error": _finite_or_none(float(np.mean(errors))) if errors else None,
            "max_error": _finite_or_none(float(np.max(errors))) if errors else None,
            "certified": len(certified),
            "violations": sum(1 for record in certified if record.violates_bound),
        })
    return summary


def _format(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def write_trial_csv(path, records) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for record in records:
            writer.writerow([_format(getattr(record, column)) for column in CSV_HEADER])
    return path


def read_trial_csv(path) -> list:
    """Rows of a trial CSV as dicts with numeric fields parsed"""
    rows = []
    with open(path, newline="") as handle:
        for row in csv.DictReader(handle):
            rows.append({
                "trial": int(row["trial"]),
                "omega": float(row["omega"]),
                "alpha": float(row["alpha"]),
                "error": float(row["error"]),
                "success": row["success"] == "1",
                "status": row["status"],
                "bound_rhs": float(row["bound_rhs"]) if row["bound_rhs"] else None,
                "margin": float(row["margin"]) if row["margin"] else None,
            })
    return rows


def write_aggregate_json(path, cells, cfg=None) -> Path:
    data = {"cells": cells}
    if cfg is not None:
        data = {"config": cfg.to_dict(), **data}
    return write_json(path, data)


def _write_outputs(cfg, result):
    files = [
        write_trial_csv(cfg.output_path(f"{cfg.name}_trials.csv"), result.records),
        write_aggregate_json(cfg.output_path(f"{cfg.name}_summary.json"), result.cells, cfg),
    ]
    for path in files:
        logger.info("Result file written", extra={"event": "result_written", "path": str(path)})
    return files
