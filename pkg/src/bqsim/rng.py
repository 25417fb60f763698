"""Counter-based seeded randomness.

Every trial gets its own Philox stream identified by (seed, stream), so
experiments are bit-reproducible and trials can run in parallel without
sharing generator state.
"""

import os

import numpy as np

SEED_ENV_VAR = "BQS_SEED"
DEFAULT_SEED = 0


def stream_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Return an independent generator for the given (seed, stream) pair."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, stream & 0xFFFFFFFFFFFFFFFF],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def default_seed() -> int:
    """Seed from the BQS_SEED environment variable, or 0."""
    return int(os.environ.get(SEED_ENV_VAR, DEFAULT_SEED))
