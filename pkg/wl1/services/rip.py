"""Restricted isometry constants.

delta_k = max over |S| = ceil(k) of max(lambda_max(A_S^T A_S) - 1, 1 - lambda_min(A_S^T A_S)).

Supports are enumerated lexicographically in batches; each batch gathers its
Gram blocks from the precomputed A^T A and runs one stacked ``eigvalsh``.
Batches are evaluated on a thread pool and merged in batch order, so the
witness is the lexicographically first maximiser whatever the worker count.
"""
import contextvars
import enum
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from wl1.config import get_ric_batch, get_ric_budget, get_workers
from wl1.monitoring.metrics import ric_supports_evaluated
from wl1.services.bounds import GeometryParams, ric_threshold
from wl1.utils.errors import EnumerationBudgetError, ParameterError
from wl1.utils.rng import STREAM_SUPPORT_SAMPLER, make_rng
from wl1.utils.validators import (ceil_int, validate_matrix,
                                  validate_positive, validate_positive_int)

logger = logging.getLogger(__name__)

DEFAULT_MC_TRIALS = 256


class RicMode(str, enum.Enum):
    EXACT = "Exact"
    LOWER_BOUND = "LowerBound"


@dataclass(frozen=True)
class RicResult:
    k_eff: int
    delta: float
    mode: RicMode
    witness: tuple
    witness_eigenvalue: float
    supports_evaluated: int

    def to_dict(self) -> dict:
        return {
            "k_eff": self.k_eff,
            "delta": self.delta,
            "mode": self.mode.value,
            "witness": [i + 1 for i in self.witness],
            "witness_eigenvalue": self.witness_eigenvalue,
            "supports_evaluated": self.supports_evaluated,
        }


@dataclass(frozen=True)
class Certification:
    delta: float
    threshold: float
    certified: bool
    margin: float
    ric: RicResult

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "threshold": self.threshold,
            "certified": self.certified,
            "margin": self.margin,
            "ric": self.ric.to_dict(),
        }


def ric_from_gram_block(G_S):
    """(delta, lambda_min, lambda_max) for one Gram block"""
    eigenvalues = np.linalg.eigvalsh(np.asarray(G_S, dtype=float))
    low, high = float(eigenvalues[0]), float(eigenvalues[-1])
    return max(high - 1.0, 1.0 - low), low, high


def _order(A, k):
    A = validate_matrix("A", A)
    k_eff = ceil_int(validate_positive("k", k))
    N = A.shape[1]
    if k_eff > N:
        raise ParameterError(f"ceil(k) = {k_eff} exceeds the number of columns {N}")
    return A, k_eff


def _evaluate(gram, supports):
    """Best (delta, row, eigenvalue) of a batch; the first row wins ties"""
    idx = np.asarray(supports, dtype=np.intp)
    blocks = gram[idx[:, :, None], idx[:, None, :]]
    eigenvalues = np.linalg.eigvalsh(blocks)
    upper = eigenvalues[:, -1] - 1.0
    lower = 1.0 - eigenvalues[:, 0]
    deviations = np.maximum(upper, lower)
    row = int(np.argmax(deviations))
    if upper[row] >= lower[row]:
        eigenvalue = float(eigenvalues[row, -1])
    else:
        eigenvalue = float(eigenvalues[row, 0])
    return float(deviations[row]), tuple(int(i) for i in idx[row]), eigenvalue


def _batches(iterable, size):
    iterator = iter(iterable)
    while True:
        batch = list(itertools.islice(iterator, size))
        if not batch:
            return
        yield batch


def _merge(best, candidate):
    if best is None or candidate[0] > best[0]:
        return candidate
    return best


def _run_batches(gram, batches, workers):
    best = None
    if workers <= 1:
        for batch in batches:
            best = _merge(best, _evaluate(gram, batch))
        return best

    with ThreadPoolExecutor(max_workers=workers) as executor:
        # a bounded window keeps memory flat on large enumerations
        for window in _batches(batches, 4 * workers):
            futures = [executor.submit(contextvars.copy_context().run, _evaluate, gram, batch)
                       for batch in window]
            for future in futures:
                best = _merge(best, future.result())
    return best


def exact_ric(A, k, budget=None, batch_size=None, workers=None) -> RicResult:
    """Exact delta_ceil(k) by enumerating every support"""
    A, k_eff = _order(A, k)
    N = A.shape[1]
    budget = get_ric_budget() if budget is None else int(budget)
    total = math.comb(N, k_eff)
    if total > budget:
        raise EnumerationBudgetError(
            total, budget, hint="use mc_ric_lower_bound for a lower bound or shrink the matrix")

    gram = A.T @ A
    batch_size = batch_size or get_ric_batch()
    workers = workers or get_workers()
    delta, witness, eigenvalue = _run_batches(
        gram, _batches(itertools.combinations(range(N), k_eff), batch_size), workers)
    ric_supports_evaluated.labels(mode=RicMode.EXACT.value).inc(total)
    logger.info(
        "RIC enumeration completed",
        extra={
            "event": "ric_enumeration_completed",
            "k_eff": k_eff,
            "N": N,
            "supports": total,
            "delta": delta,
            "workers": workers,
        },
    )
    return RicResult(k_eff=k_eff, delta=max(delta, 0.0), mode=RicMode.EXACT,
                     witness=witness, witness_eigenvalue=eigenvalue, supports_evaluated=total)


def _sample_supports(seed, batch_index, count, N, k_eff):
    rng = make_rng(seed, batch_index, STREAM_SUPPORT_SAMPLER)
    keys = rng.random((count, N))
    chosen = np.argpartition(keys, k_eff - 1, axis=1)[:, :k_eff]
    return np.sort(chosen, axis=1)


def mc_ric_lower_bound(A, k, trials: int, seed: int = 0, batch_size=None, workers=None) -> RicResult:
    """Lower bound on delta_ceil(k) from uniformly sampled supports

    When trials covers every support the supports are enumerated instead;
    the result is still reported as a lower bound.
    """
    A, k_eff = _order(A, k)
    N = A.shape[1]
    trials = validate_positive_int("trials", trials)
    gram = A.T @ A
    batch_size = batch_size or get_ric_batch()
    workers = workers or get_workers()

    total = math.comb(N, k_eff)
    if trials >= total:
        batches = _batches(itertools.combinations(range(N), k_eff), batch_size)
        evaluated = total
    else:
        sizes = [min(batch_size, trials - start) for start in range(0, trials, batch_size)]
        batches = (_sample_supports(seed, index, size, N, k_eff)
                   for index, size in enumerate(sizes))
        evaluated = trials

    delta, witness, eigenvalue = _run_batches(gram, batches, workers)
    ric_supports_evaluated.labels(mode=RicMode.LOWER_BOUND.value).inc(evaluated)
    logger.debug(
        "RIC sampling completed",
        extra={"event": "ric_sampling_completed", "k_eff": k_eff, "supports": evaluated,
               "delta": delta, "seed": seed},
    )
    return RicResult(k_eff=k_eff, delta=max(delta, 0.0), mode=RicMode.LOWER_BOUND,
                     witness=witness, witness_eigenvalue=eigenvalue, supports_evaluated=evaluated)


def certify_recovery(A, k, g: GeometryParams, mc_trials=DEFAULT_MC_TRIALS, seed=0,
                     budget=None) -> Certification:
    """Decide delta_tk < delta_t^omega for a concrete matrix

    A sampled lower bound at or above the threshold refutes without
    enumerating; only an exact value can certify.
    """
    k = validate_positive_int("k", k)
    threshold = ric_threshold(g)
    order = g.t * k
    if mc_trials:
        lower = mc_ric_lower_bound(A, order, mc_trials, seed)
        if lower.delta >= threshold:
            logger.info(
                "Recovery condition refuted by sampling",
                extra={"event": "certification_refuted", "delta": lower.delta,
                       "threshold": threshold},
            )
            return Certification(delta=lower.delta, threshold=threshold, certified=False,
                                 margin=threshold - lower.delta, ric=lower)
    exact = exact_ric(A, order, budget=budget)
    return Certification(delta=exact.delta, threshold=threshold,
                         certified=bool(exact.delta < threshold),
                         margin=threshold - exact.delta, ric=exact)
