"""Deterministic seeding for replicated simulation."""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> int:
    """One splitmix64 output for the given 64-bit state."""
    z = (state + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def stream_seed(base_seed: int, index: int) -> int:
    """Seed for stream ``index`` derived from ``base_seed``."""
    if base_seed < 0 or index < 0:
        raise ValueError("seeds and indices must be non-negative")
    return splitmix64(splitmix64(base_seed & _MASK) ^ (index & _MASK))


def stream_rng(base_seed: int, index: int) -> np.random.Generator:
    """Independent generator for stream ``index``.

    The result depends only on ``(base_seed, index)`` so replicate ``r``
    is reproducible regardless of how work is split across workers.
    """
    return np.random.Generator(np.random.PCG64(stream_seed(base_seed, index)))
