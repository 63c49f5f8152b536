"""Counter-based random streams keyed by (seed, trial id, stream id).

Each trial owns its generators, so results do not depend on the order
in which worker threads pick trials up.
"""
import numpy as np

MASK_64 = (1 << 64) - 1

# Stream ids used by the experiment harness.
STREAM_MATRIX = 0
STREAM_SIGNAL = 1
STREAM_SUPPORT = 2
STREAM_NOISE = 3
STREAM_SUPPORT_SAMPLER = 4


def make_rng(seed: int, trial_id: int = 0, stream_id: int = 0) -> np.random.Generator:
    """Philox generator whose key is derived from the three identifiers"""
    sequence = np.random.SeedSequence(
        [int(seed) & MASK_64, int(trial_id) & MASK_64, int(stream_id) & MASK_64]
    )
    return np.random.Generator(np.random.Philox(sequence))
