"""Simple random walks on Z^d and geometric killing times.

The walk generator is the sole source of randomness in the package. Identical
``(d, n, seed)`` always produce bit-identical paths, on every platform and at
any worker count.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import CapacityError, ParameterError
from .rng import generator_for

# Coordinates are stored as 32-bit signed integers; |S(j)| <= n keeps them
# exact for every n below the memory budget.
COORD_DTYPE = np.int32

# Default cap on steps per generated path (~0.5 GiB of int32 coordinates at d=4).
DEFAULT_MAX_STEPS = 1 << 25


def step_directions(d: int) -> NDArray[np.int32]:
    """The 2d unit steps of Z^d, in the fixed order +e1, -e1, +e2, -e2, ...

    This order is part of the reproducibility contract: direction index
    ``2*axis + (0 if positive else 1)``.
    """
    dirs = np.zeros((2 * d, d), dtype=COORD_DTYPE)
    for axis in range(d):
        dirs[2 * axis, axis] = 1
        dirs[2 * axis + 1, axis] = -1
    return dirs


@dataclass(frozen=True)
class WalkPath:
    """A nearest-neighbor trajectory on Z^d.

    points[j] is the walker position after j steps; points[0] is the origin.
    """

    points: NDArray[np.int32]
    seed: int
    d: int

    @property
    def n_steps(self) -> int:
        return self.points.shape[0] - 1

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class KillingTime:
    """A geometric horizon: P(T = j) = (1 - lam) * lam**j for j = 0, 1, 2, ..."""

    value: int
    lam: float

    def __post_init__(self):
        if self.value < 0:
            raise ParameterError("killing time must be nonnegative")


def generate_walk(d: int, n: int, seed: int,
                  max_steps: int = DEFAULT_MAX_STEPS) -> WalkPath:
    """Generate a simple random walk of n steps on Z^d started at the origin.

    Args:
        d: lattice dimension, >= 1.
        n: number of steps, >= 0.
        seed: 64-bit reproducibility token.
        max_steps: memory budget; n beyond it raises CapacityError.

    Returns:
        WalkPath with n+1 points, points[0] = 0.
    """
    if d < 1:
        raise ParameterError(f"dimension must be >= 1, got {d}")
    if n < 0:
        raise ParameterError(f"step count must be >= 0, got {n}")
    if n > max_steps:
        raise CapacityError(f"n={n} exceeds the step budget {max_steps}")

    points = np.zeros((n + 1, d), dtype=COORD_DTYPE)
    if n > 0:
        rng = generator_for(seed, 0x57414C4B)  # stream label: "WALK"
        steps = rng.integers(0, 2 * d, size=n)
        deltas = step_directions(d)[steps]
        np.cumsum(deltas, axis=0, dtype=COORD_DTYPE, out=points[1:])
    if __debug__ and n > 0:
        # int32 overflow cannot occur while |coord| <= n < 2**31, but a future
        # dtype change would be caught here.
        ext = max(abs(int(points.min())), abs(int(points.max())))
        assert ext <= n, "coordinate overflow in walk generation"
        steps_l1 = np.abs(np.diff(points, axis=0)).sum(axis=1)
        assert (steps_l1 == 1).all(), "non-nearest-neighbor step generated"
    return WalkPath(points=points, seed=int(seed), d=d)


def sample_killing_time(lam: float, seed: int) -> KillingTime:
    """Draw one geometric killing time with killing rate 1 - lam.

    P(T = j) = (1 - lam) * lam**j on {0, 1, 2, ...}; lam must lie in [0, 1).
    """
    value = sample_killing_times(lam, seed, 1)[0]
    return KillingTime(value=int(value), lam=float(lam))


def sample_killing_times(lam: float, seed: int, size: int) -> NDArray[np.int64]:
    """Vector of iid geometric killing times (support {0, 1, 2, ...})."""
    if not 0.0 <= lam < 1.0:
        raise ParameterError(f"killing parameter must satisfy 0 <= lam < 1, got {lam}")
    if lam == 0.0:
        return np.zeros(size, dtype=np.int64)
    rng = generator_for(seed, 0x4B494C4C)  # stream label: "KILL"
    # numpy's geometric counts trials to first success (support >= 1).
    return rng.geometric(1.0 - lam, size=size).astype(np.int64) - 1
