"""Per-trial random streams.

Every experiment uses one PCG64 generator seeded with ``np.random.PCG64(seed)``
(numpy's SeedSequence hashing of the 64-bit master seed). Trial ``i`` owns the
block of raw 64-bit outputs ``[i*DRAWS_PER_TRIAL, (i+1)*DRAWS_PER_TRIAL)``.
The block is reached with ``PCG64.advance`` for single trials and by slicing
one bulk ``random_raw`` call for whole batches; both give identical words, so
records do not depend on execution order.
"""
from __future__ import annotations

import numpy as np

DRAWS_PER_TRIAL = 8
SEED_MAX = 2**64 - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Generator positioned at the start of ``trial``'s draw block."""
    if trial < 0:
        raise ValueError("trial index must be non-negative")
    bitgen = np.random.PCG64(check_seed(seed))
    bitgen.advance(trial * DRAWS_PER_TRIAL)
    return np.random.Generator(bitgen)


def trial_draws(seed: int, start: int, count: int) -> np.ndarray:
    """Raw draw blocks for trials ``start .. start+count-1``, shape (count, DRAWS_PER_TRIAL)."""
    bitgen = np.random.PCG64(check_seed(seed))
    bitgen.advance(start * DRAWS_PER_TRIAL)
    raw = bitgen.random_raw(count * DRAWS_PER_TRIAL)
    return np.asarray(raw, dtype=np.uint64).reshape(count, DRAWS_PER_TRIAL)
