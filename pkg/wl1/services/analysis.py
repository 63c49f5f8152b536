"""Convex combinations of sparse vectors and the shifted power inequality.

A vector v with ||v||_inf <= alpha and ||v||_1 <= k*alpha is a convex
combination of vectors u with supp(u) in supp(v), at most ceil(k) nonzeros,
||u||_1 = ||v||_1 and ||u||_inf <= alpha.

``sparse_decompose`` peels off vertices of the capped simplex
{0 <= p_i <= 1, sum p = c} (c = ||v||_1 / alpha) one at a time. Each step
drives at least one coordinate of the remainder to 0 or 1 for good, so the
number of parts is at most |supp(v)| + 1.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from wl1.models.signal import SparseSignal, as_array
from wl1.utils.errors import ParameterError
from wl1.utils.validators import (ceil_int, near_integer, validate_nonnegative,
                                  validate_positive, validate_positive_int,
                                  validate_vector)

logger = logging.getLogger(__name__)

SCALAR_TOL = 1e-12
VECTOR_TOL = 1e-10
_SNAP = 1e-13


@dataclass(frozen=True)
class ConvexSparseDecomposition:
    parts: tuple

    def __len__(self):
        return len(self.parts)

    @property
    def weights(self) -> np.ndarray:
        return np.array([weight for weight, _ in self.parts], dtype=float)

    def reconstruct(self) -> np.ndarray:
        total = np.zeros_like(self.parts[0][1].entries)
        for weight, part in self.parts:
            total = total + weight * part.entries
        return total


@dataclass
class DecompositionCheck:
    """Worst violation per invariant; ok when every one is within tolerance"""

    ok: bool
    violations: dict = field(default_factory=dict)
    failed: list = field(default_factory=list)


def _vertex(p, count, fraction):
    """Capped-simplex vertex with ones on the count largest entries of p"""
    order = np.argsort(-p, kind="stable")
    u = np.zeros_like(p)
    u[order[:count]] = 1.0
    fractional = None
    if fraction > 0.0:
        fractional = int(order[count])
        u[fractional] = fraction
    return u, order[:count], fractional


def _step_size(p, u, ones, fractional, fraction):
    """Largest lambda keeping (p - lambda u) / (1 - lambda) inside the capped simplex"""
    limits = [1.0]
    if ones.size:
        limits.append(float(np.min(p[ones])))
    idle = u == 0.0
    if np.any(idle):
        limits.append(float(np.min(1.0 - p[idle])))
    if fractional is not None:
        limits.append(p[fractional] / fraction)
        limits.append((1.0 - p[fractional]) / (1.0 - fraction))
    return max(0.0, min(limits))


def sparse_decompose(v, alpha: float, k) -> ConvexSparseDecomposition:
    """Write v in T(alpha, k) as a convex combination of ceil(k)-sparse vectors"""
    entries = validate_vector("v", as_array(v))
    alpha = validate_positive("alpha", alpha)
    k_eff = ceil_int(validate_positive("k", k))
    magnitude = np.abs(entries)
    l1 = float(np.sum(magnitude))
    if float(np.max(magnitude, initial=0.0)) > alpha * (1.0 + SCALAR_TOL):
        raise ParameterError(f"||v||_inf = {np.max(magnitude)} exceeds alpha = {alpha}")
    if l1 > k * alpha * (1.0 + SCALAR_TOL):
        raise ParameterError(f"||v||_1 = {l1} exceeds k*alpha = {k * alpha}")

    signs = np.sign(entries)
    support = np.flatnonzero(magnitude > 0.0)
    if support.size <= k_eff:
        # v itself is one of the sparse vectors
        return ConvexSparseDecomposition(parts=((1.0, SparseSignal(entries.copy())),))

    p = np.clip(magnitude[support] / alpha, 0.0, 1.0)
    c = float(np.sum(p))
    snapped = near_integer(c, tol=SCALAR_TOL)
    if snapped is not None:
        count, fraction = snapped, 0.0
    else:
        count = int(math.floor(c))
        fraction = c - count
    if count + (fraction > 0.0) > k_eff:
        raise ParameterError(f"||v||_1 / alpha = {c} needs more than {k_eff} nonzeros")

    def lift(u):
        full = np.zeros_like(entries)
        full[support] = alpha * signs[support] * u
        return SparseSignal(full)

    parts = []
    remaining = 1.0
    for _ in range(2 * support.size + 2):
        u, ones, fractional = _vertex(p, count, fraction)
        step = _step_size(p, u, ones, fractional, fraction)
        if step >= 1.0 - _SNAP:
            parts.append((remaining, lift(u)))
            break
        parts.append((remaining * step, lift(u)))
        remaining *= 1.0 - step
        p = (p - step * u) / (1.0 - step)
        p[np.abs(p) < _SNAP] = 0.0
        p[np.abs(p - 1.0) < _SNAP] = 1.0
    else:
        # p converged onto a vertex without the step reaching 1
        parts.append((remaining, lift(_vertex(p, count, fraction)[0])))

    parts = tuple((weight, part) for weight, part in parts if weight > 0.0)
    logger.debug(
        "Sparse decomposition built",
        extra={"event": "decomposition_built", "parts": len(parts), "support": int(support.size)},
    )
    return ConvexSparseDecomposition(parts=parts)


def verify_decomposition(v, dec: ConvexSparseDecomposition, alpha: float, k) -> DecompositionCheck:
    """Check every decomposition invariant and report the worst violation of each"""
    entries = as_array(v)
    k_eff = ceil_int(k)
    if not dec.parts:
        return DecompositionCheck(ok=False, violations={"convex weights": math.inf},
                                  failed=["convex weights"])
    weights = dec.weights
    support = set(int(i) for i in np.flatnonzero(entries))
    l1 = float(np.sum(np.abs(entries)))

    convex = max(abs(float(np.sum(weights)) - 1.0),
                 float(np.max(-weights, initial=0.0)),
                 float(np.max(weights - 1.0, initial=0.0)))
    sparsity = 0
    outside = 0
    l1_error = 0.0
    linf_excess = 0.0
    for _, part in dec.parts:
        nonzero = np.flatnonzero(part.entries)
        sparsity = max(sparsity, nonzero.size - k_eff)
        outside = max(outside, sum(1 for i in nonzero if int(i) not in support))
        l1_error = max(l1_error, abs(float(np.sum(np.abs(part.entries))) - l1))
        linf_excess = max(linf_excess, float(np.max(np.abs(part.entries))) - alpha)
    reconstruction = float(np.max(np.abs(dec.reconstruct() - entries)))

    violations = {
        "convex weights": convex,
        "sparsity": max(sparsity, 0),
        "support": outside,
        "l1 norm": l1_error,
        "linf": max(linf_excess, 0.0),
        "reconstruction": reconstruction,
    }
    limits = {
        "convex weights": SCALAR_TOL,
        "sparsity": 0,
        "support": 0,
        "l1 norm": SCALAR_TOL * max(1.0, l1),
        "linf": SCALAR_TOL * alpha,
        "reconstruction": VECTOR_TOL,
    }
    failed = [name for name, value in violations.items() if value > limits[name]]
    return DecompositionCheck(ok=not failed, violations=violations, failed=failed)


def shifted_power_inequality(a, k: int, lam: float, alpha_exp: float):
    """(lhs, rhs, holds) for sum_{j>k} a_j^p <= k ((sum_{i<=k} a_i^p / k)^(1/p) + lam/k)^p

    a must be nonincreasing and nonnegative with
    sum_{i<=k} a_i + lam >= sum_{i>k} a_i.
    """
    a = validate_vector("a", a)
    k = validate_positive_int("k", k)
    lam = validate_nonnegative("lambda", lam)
    p = float(alpha_exp)
    if not p >= 1.0:
        raise ParameterError(f"exponent must be >= 1, got {alpha_exp}")
    if np.any(a < 0.0):
        raise ParameterError("a must be nonnegative")
    if np.any(np.diff(a) > 0.0):
        raise ParameterError("a must be sorted nonincreasing")

    head, tail = a[:k], a[k:]
    head_sum, tail_sum = float(np.sum(head)), float(np.sum(tail))
    if head_sum + lam < tail_sum * (1.0 - SCALAR_TOL):
        raise ParameterError(
            f"hypothesis fails: sum of the first {k} entries plus lambda ({head_sum + lam})"
            f" is below the tail sum {tail_sum}")

    lhs = float(np.sum(tail ** p))
    rhs = k * ((float(np.sum(head ** p)) / k) ** (1.0 / p) + lam / k) ** p
    return lhs, rhs, lhs <= rhs * (1.0 + SCALAR_TOL)
