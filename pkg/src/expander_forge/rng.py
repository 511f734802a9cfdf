"""Deterministic random streams.

All randomness flows through numpy's Philox bit generator, which is
counter-based: a master stream is keyed by the user's 64-bit seed, and
per-task streams are derived by jumping the counter. Results are therefore
independent of how candidate evaluations are scheduled or batched.
"""

from __future__ import annotations

import numpy as np

_SEED_MAX = 2**64


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < _SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def master_rng(seed: int) -> np.random.Generator:
    """Main stream for a run with the given seed."""
    return np.random.Generator(np.random.Philox(key=_check_seed(seed)))


def task_rng(seed: int, index: int) -> np.random.Generator:
    """Stream for sub-task `index` of a run, disjoint from the master stream.

    Derived by jumping the Philox counter, so task i's stream is the same no
    matter which worker or batch evaluates it.
    """
    if index < 0:
        raise ValueError("task index must be nonnegative")
    return np.random.Generator(np.random.Philox(key=_check_seed(seed)).jumped(index + 1))
