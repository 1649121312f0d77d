"""Seed handling shared by the random routines."""

from __future__ import annotations

import numpy as np


def make_rng(seed) -> np.random.Generator:
    """Generator from an int seed, or the generator itself."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ValueError("a seed is required")
    return np.random.default_rng(seed)


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for trial ``index`` of a run seeded with ``seed``.

    The stream depends only on ``(seed, index)``, so changing the number of
    trials never changes the outcome of the trials that are kept.
    """
    if isinstance(seed, np.random.Generator) or seed is None:
        raise ValueError("per-trial streams need an integer master seed")
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))
