from .signal import (NoiseSet, ProblemInstance, SparseSignal, SupportEstimate,
                     WeightVector, as_array, best_k_term, build_weights,
                     complement, l1_on, support_of, support_stats,
                     top_k_support, weighted_l1_norm)

__all__ = [
    "SparseSignal",
    "SupportEstimate",
    "WeightVector",
    "ProblemInstance",
    "NoiseSet",
    "best_k_term",
    "top_k_support",
    "support_stats",
    "build_weights",
    "weighted_l1_norm",
    "support_of",
    "complement",
    "l1_on",
    "as_array",
]
