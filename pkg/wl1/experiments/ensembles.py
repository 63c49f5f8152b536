"""Random instances. Each draw uses its own (seed, trial_id, stream) generator."""
import logging

import numpy as np

from wl1.models.signal import NoiseSet, SupportEstimate, top_k_support
from wl1.services.bounds import gaussian_noise_radius
from wl1.utils.errors import ParameterError
from wl1.utils.rng import (STREAM_MATRIX, STREAM_NOISE, STREAM_SIGNAL,
                           STREAM_SUPPORT, make_rng)
from wl1.utils.validators import require_integer, validate_nonnegative

logger = logging.getLogger(__name__)

# Dantzig noise is rescaled to sit just inside the box.
BINDING_FRACTION = 0.99
# Compressible tails: the j-th largest off-support entry has size TAIL_SCALE * j**-TAIL_DECAY.
TAIL_SCALE = 0.05
TAIL_DECAY = 1.5


def gaussian_matrix(n, N, rng) -> np.ndarray:
    """i.i.d. N(0, 1/n) entries"""
    return rng.standard_normal((n, N)) / np.sqrt(n)


def normalized_gaussian_matrix(n, N, rng) -> np.ndarray:
    """Gaussian columns rescaled to unit l2 norm"""
    A = gaussian_matrix(n, N, rng)
    return A / np.linalg.norm(A, axis=0)


def gen_gaussian_instance(cfg, trial_id: int):
    """(A, x_true, T0) for one trial; bit-identical for the same (seed, trial_id)"""
    draw = normalized_gaussian_matrix if cfg.matrix == "normalized" else gaussian_matrix
    A = draw(cfg.n, cfg.N, make_rng(cfg.seed, trial_id, STREAM_MATRIX))
    rng = make_rng(cfg.seed, trial_id, STREAM_SIGNAL)
    support = np.sort(rng.choice(cfg.N, size=cfg.k, replace=False))
    if cfg.amplitude in ("signs", "compressible"):
        amplitudes = rng.choice(np.array([-1.0, 1.0]), size=cfg.k)
    else:
        amplitudes = rng.standard_normal(cfg.k)
        # a Gaussian draw of exactly zero would shrink the support
        amplitudes[amplitudes == 0.0] = 1.0
    x_true = np.zeros(cfg.N)
    x_true[support] = amplitudes
    if cfg.amplitude == "compressible":
        x_true += compressible_tail(cfg.N, support, rng)
    return A, x_true, top_k_support(x_true, cfg.k)


def compressible_tail(N, support, rng) -> np.ndarray:
    """Random-sign power-law entries on every index outside support"""
    outside = np.setdiff1d(np.arange(N), support)
    sizes = TAIL_SCALE * np.arange(1, outside.size + 1, dtype=float) ** -TAIL_DECAY
    tail = np.zeros(N)
    tail[rng.permutation(outside)] = sizes * rng.choice(np.array([-1.0, 1.0]), size=outside.size)
    return tail


def gen_support_estimate(T0, alpha, rho, N, seed, trial_id=0, k=None) -> SupportEstimate:
    """T~ with alpha*rho*k indices drawn from T0 and the rest from its complement

    Estimates for different alpha in one trial share their random order, so
    a more accurate estimate swaps wrong indices for correct ones.
    """
    T0 = sorted(int(i) for i in T0)
    k = len(T0) if k is None else int(k)
    n_est = require_integer("rho*k", rho * k)
    n_correct = require_integer("alpha*rho*k", alpha * rho * k)
    n_wrong = n_est - n_correct
    outside = sorted(set(range(N)) - set(T0))
    if n_correct > len(T0):
        raise ParameterError(f"alpha*rho*k = {n_correct} exceeds |T0| = {len(T0)}")
    if n_wrong > len(outside):
        raise ParameterError(f"(1-alpha)*rho*k = {n_wrong} exceeds |T0^c| = {len(outside)}")

    rng = make_rng(seed, trial_id, STREAM_SUPPORT)
    correct = rng.permutation(np.asarray(T0, dtype=int))[:n_correct]
    wrong = rng.permutation(np.asarray(outside, dtype=int))[:n_wrong]
    indices = tuple(sorted(int(i) for i in np.concatenate([correct, wrong])))
    beta = 1.0 - alpha if n_est else 1.0
    return SupportEstimate(indices=indices, k=k, rho=rho, alpha=alpha if n_est else 0.0, beta=beta)


def gen_noise(kind, level, A, rng) -> np.ndarray:
    """Noise inside the constraint set of radius level

    l2: ||z||_2 = 0.99 level. ds: ||A^T z||_inf = 0.99 level.
    """
    kind = NoiseSet.parse(kind)
    level = validate_nonnegative("level", level)
    A = np.asarray(A, dtype=float)
    if level == 0.0:
        return np.zeros(A.shape[0])
    z = rng.standard_normal(A.shape[0])
    if kind is NoiseSet.L2_BALL:
        size = float(np.linalg.norm(z))
    else:
        size = float(np.max(np.abs(A.T @ z)))
    if size == 0.0:
        raise ParameterError("noise draw has zero size under the constraint norm")
    return BINDING_FRACTION * level * z / size


def gen_gaussian_noise(sigma, n, rng) -> np.ndarray:
    """z ~ N(0, sigma^2 I)"""
    return validate_nonnegative("sigma", sigma) * rng.standard_normal(n)


def trial_noise(cfg, A, trial_id):
    """(z, eps) for one trial"""
    rng = make_rng(cfg.seed, trial_id, STREAM_NOISE)
    if cfg.sigma > 0.0:
        size = cfg.n if cfg.noise_set is NoiseSet.L2_BALL else cfg.N
        return gen_gaussian_noise(cfg.sigma, cfg.n, rng), gaussian_noise_radius(
            cfg.noise_set, size, cfg.sigma)
    return gen_noise(cfg.noise_set, cfg.eps, A, rng), cfg.eps
