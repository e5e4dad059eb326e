"""Seed derivation and generator construction.

All randomness in the package flows through `generator_for`. Per-trial seeds
are derived by hashing (master_seed, stream labels, trial index) with a
SplitMix64-style mixer, so results never depend on execution order or worker
count.
"""
from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    """SplitMix64 finalizer: bijective 64-bit avalanche."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master_seed: int, *parts: int) -> int:
    """Hash a master seed and any number of integer labels into a 64-bit seed.

    Deterministic and platform independent; distinct label tuples give
    (with overwhelming probability) distinct streams.
    """
    h = _mix64((int(master_seed) & _MASK64) + _GAMMA)
    for p in parts:
        h = _mix64(h ^ ((int(p) & _MASK64) * _GAMMA & _MASK64))
    return h


def generator_for(master_seed: int, *parts: int) -> np.random.Generator:
    """A PCG64 generator seeded from `derive_seed(master_seed, *parts)`."""
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, *parts)))
