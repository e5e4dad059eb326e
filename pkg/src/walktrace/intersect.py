"""Intersection events between walk segments and their Monte Carlo estimators.

Covers the point-set intersection primitive, the long-range intersection
probability f(n;k), the three-walk non-intersection probability P(F_n), and
the midpoint interval scheme with its statistic L.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from ._keys import point_keys, point_keys_pair
from .errors import ParameterError
from .rng import generator_for
from .walks import WalkPath, step_directions

INTERVAL_EXPONENT = 13.0 / 12.0


@dataclass(frozen=True)
class IntersectionEstimate:
    """One Bernoulli Monte Carlo estimate of an intersection probability."""

    kind: str                 # "f" or "F"
    n: int
    k: Optional[int]
    trials: int
    hits: int
    seed: int

    @property
    def mean(self) -> float:
        return self.hits / self.trials

    @property
    def stderr(self) -> float:
        p = self.mean
        return math.sqrt(p * (1.0 - p) / self.trials)


@dataclass(frozen=True)
class IntervalScheme:
    """Decomposition of [0, n] into N intervals around the midpoint.

    a = n (log n)^(-b) is the interval length; t[j] = floor(n/2 - j*a) walks
    left from the midpoint and tprime[k] = floor(n/2 + k*a) right, for
    j, k = 0..N//2. All endpoint arithmetic floors fractional times.
    """

    n: int
    b: float
    count: int                       # N = floor((log n)^b)
    a: float                         # n (log n)^(-b)
    t: NDArray[np.int64] = field(repr=False)
    tprime: NDArray[np.int64] = field(repr=False)

    @property
    def half(self) -> int:
        return self.count // 2


def f_prediction(n: int, k: int) -> float:
    """Leading-order long-range intersection probability.

    log(1 + 1/(k^2 + 2k)) / (2 log n).
    """
    return math.log(1.0 + 1.0 / (k * k + 2 * k)) / (2.0 * math.log(n))


def big_f_prediction(n: int) -> float:
    """Leading-order three-walk non-intersection probability: (pi^2/8)/log n."""
    return (math.pi ** 2 / 8.0) / math.log(n)


def segments_intersect(path1: WalkPath, range1: tuple[int, int],
                       path2: WalkPath, range2: tuple[int, int]) -> bool:
    """True iff the point sets of path1[a1..b1] and path2[a2..b2] meet."""
    a1, b1 = range1
    a2, b2 = range2
    if not (0 <= a1 <= b1 <= path1.n_steps and 0 <= a2 <= b2 <= path2.n_steps):
        raise IndexError("segment range out of bounds")
    k1, k2 = point_keys_pair(path1.points[a1:b1 + 1], path2.points[a2:b2 + 1])
    if k2.size < k1.size:
        k1, k2 = k2, k1
    # intersect1d is sort-based, which also supports the void-key fallback
    return bool(np.intersect1d(k1, k2).size)


def _walk_points(rng, n: int, deltas) -> NDArray[np.int64]:
    """Points of a fresh n-step walk from the origin (d=4)."""
    pts = np.zeros((n + 1, 4), np.int64)
    if n:
        steps = rng.integers(0, 8, size=n)
        np.cumsum(deltas[steps], axis=0, out=pts[1:])
    return pts


def _pack_trial(walks: list[NDArray[np.int64]]) -> list[NDArray[np.int64]] | None:
    """Pack each walk's points into one comparable int64 key space.

    Coordinates are offset by the per-trial joint minimum, which keeps the
    16-bit fields exact while the joint per-coordinate range stays below
    2^16. A walk's range is bounded by its step count, so this only fails
    for astronomically unlikely near-ballistic paths; None signals the
    caller to take the exact fallback.
    """
    mins = np.min([w.min(axis=0) for w in walks], axis=0)
    maxs = np.max([w.max(axis=0) for w in walks], axis=0)
    if int((maxs - mins).max()) > 0xFFFF:
        return None
    keys = []
    for w in walks:
        off = w - mins
        keys.append((((off[:, 0] << 16 | off[:, 1]) << 16 | off[:, 2]) << 16) | off[:, 3])
    return keys


def _points_meet(a: NDArray[np.int64], b: NDArray[np.int64]) -> bool:
    """Exact point-set intersection through the generic key route."""
    ka, kb = point_keys_pair(a.astype(np.int32), b.astype(np.int32))
    return bool(np.intersect1d(ka, kb).size)


def _map_trials(trial_fn, trials: int, workers: int) -> int:
    """Count successes of trial_fn(i) over i < trials, slot-indexed.

    Worker scheduling cannot change the result: each trial writes its own
    slot and the reduction is an integer sum.
    """
    if workers <= 1:
        return sum(trial_fn(i) for i in range(trials))
    from concurrent.futures import ThreadPoolExecutor

    outcomes = np.zeros(trials, dtype=bool)

    def run(i):
        outcomes[i] = trial_fn(i)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run, range(trials)))
    return int(outcomes.sum())


def estimate_f(n: int, k: int, trials: int | None = None, seed: int = 0,
               workers: int = 1) -> IntersectionEstimate:
    """Monte Carlo frequency of S1[0,n] meeting S2[kn,(k+1)n], both from 0.

    When `trials` is omitted a 1000-trial pilot sets
    trials = max(1e5, ceil(100 / p_pilot)) targeting ~10% relative stderr.
    """
    if n < 2 or k < 1:
        raise ParameterError(f"need n >= 2 and k >= 1, got n={n}, k={k}")
    if (k + 1) * n > (1 << 20):
        raise ParameterError(f"(k+1)*n = {(k + 1) * n} exceeds the per-trial step budget")
    if trials is None:
        pilot = estimate_f(n, k, trials=1000, seed=derived_pilot_seed(seed), workers=workers)
        p_hat = max(pilot.hits, 1) / pilot.trials
        trials = max(10 ** 5, math.ceil(100.0 / p_hat))
    deltas = step_directions(4).astype(np.int64)

    def one(i: int) -> bool:
        rng = generator_for(seed, 0x666E6B, i)  # stream label: "fnk"
        w1 = _walk_points(rng, n, deltas)
        w2 = _walk_points(rng, (k + 1) * n, deltas)
        packed = _pack_trial([w1, w2])
        if packed is None:
            return _points_meet(w1, w2[k * n:])
        return bool(np.isin(packed[0], packed[1][k * n:]).any())

    hits = _map_trials(one, trials, workers)
    return IntersectionEstimate(kind="f", n=n, k=k, trials=trials, hits=hits, seed=seed)


def derived_pilot_seed(seed: int) -> int:
    return (seed ^ 0x70696C6F74) & 0xFFFFFFFFFFFFFFFF  # "pilot"


def estimate_F(n: int, trials: int, seed: int = 0, workers: int = 1) -> IntersectionEstimate:
    """Monte Carlo frequency of the three-walk non-intersection event F_n.

    Event: S1(0,n] avoids S2[0,n] and S3[0,n], and the origin is not
    revisited by S3 on (0,n]. All walks start at the origin.
    """
    if n < 1 or trials < 1:
        raise ParameterError("need n >= 1 and trials >= 1")
    if n > (1 << 20):
        raise ParameterError(f"n = {n} exceeds the per-trial step budget")
    deltas = step_directions(4).astype(np.int64)
    chunk = 2048
    pre = min(n, 1024)

    def one(i: int) -> bool:
        rng = generator_for(seed, 0x466E, i)  # stream label: "Fn"
        walks = [_walk_points(rng, n, deltas) for _ in range(3)]
        packed = _pack_trial(walks)
        if packed is None:
            w1, w2, w3 = walks
            return (not (w3[1:] == 0).all(axis=1).any()
                    and not _points_meet(w1[1:], np.vstack([w2, w3])))
        k1, k2, k3 = packed
        if (k3[1:] == k3[0]).any():
            return False
        # prescreen: most intersections happen near the shared origin
        kpre = np.sort(np.concatenate([k2[:pre + 1], k3[:pre + 1]]))
        if _sorted_meets(kpre, k1[1:pre + 1]):
            return False
        k23 = np.sort(np.concatenate([k2, k3]))
        for lo in range(1, n + 1, chunk):
            part = k1[lo:lo + chunk]
            if part.size and _sorted_meets(k23, part):
                return False
        return True

    hits = _map_trials(one, trials, workers)
    return IntersectionEstimate(kind="F", n=n, k=None, trials=trials, hits=hits, seed=seed)


def _sorted_meets(sorted_keys: NDArray[np.int64], probe: NDArray[np.int64]) -> bool:
    pos = np.searchsorted(sorted_keys, probe)
    pos[pos == sorted_keys.size] = sorted_keys.size - 1
    return bool((sorted_keys[pos] == probe).any())


def enumerate_F1_exact() -> float:
    """Exhaustive P(F_1) over the 8^3 equally likely first-step triples."""
    dirs = [tuple(row) for row in step_directions(4)]
    origin = (0, 0, 0, 0)
    hits = 0
    for s1 in dirs:
        for s2 in dirs:
            for s3 in dirs:
                if s3 == origin:
                    continue
                if s1 not in (origin, s2, s3):
                    hits += 1
    return hits / 8 ** 3


def interval_scheme(n: int, b: float = INTERVAL_EXPONENT) -> IntervalScheme:
    """Endpoints t_j (leftward) and t'_k (rightward) around n/2.

    Requires the interval length n(log n)^(-b) to be at least 1 and the
    interval count floor((log n)^b) to be at least 2.
    """
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n}")
    log_n = math.log(n)
    a = n * log_n ** (-b)
    count = int(log_n ** b)
    if a < 1.0:
        raise ParameterError(f"interval length {a:.3f} < 1 at n={n}; n too small")
    if count < 2:
        raise ParameterError(f"interval count {count} < 2 at n={n}; n too small")
    half = count // 2
    j = np.arange(half + 1, dtype=np.float64)
    t = np.floor(n / 2.0 - j * a).astype(np.int64)
    tprime = np.floor(n / 2.0 + j * a).astype(np.int64)
    if t[-1] < 0 or tprime[-1] > n:
        raise ParameterError("interval endpoints escaped [0, n]")
    return IntervalScheme(n=n, b=b, count=count, a=a, t=t, tprime=tprime)


def _interval_key_sets(path: WalkPath, scheme: IntervalScheme):
    """Sorted unique point keys of each I_j and I'_k (index 1..half).

    One key space for the whole horizon keeps every pair comparable.
    """
    keys = point_keys(path.points[:scheme.n + 1])
    half = scheme.half
    left, right = [], []
    for j in range(1, half + 1):
        lo, hi = int(scheme.t[j]), int(scheme.t[j - 1])
        left.append(np.unique(keys[lo:hi + 1]))
        lo, hi = int(scheme.tprime[j - 1]), int(scheme.tprime[j])
        right.append(np.unique(keys[lo:hi + 1]))
    return left, right


def longest_intersection_L(path: WalkPath, scheme: IntervalScheme) -> int:
    """L = max{ j+k : trace of I_j meets trace of I'_k }, always >= 2.

    I_1 and I'_1 share the midpoint S(n/2), so the maximum exists. Scans
    diagonals j+k downward and stops at the first intersecting pair; equals
    the all-pairs maximum exactly.
    """
    if path.n_steps < scheme.n:
        raise ParameterError("path shorter than the scheme horizon")
    left, right = _interval_key_sets(path, scheme)
    half = scheme.half
    for total in range(2 * half, 1, -1):
        j_lo = max(1, total - half)
        j_hi = min(half, total - 1)
        for j in range(j_lo, j_hi + 1):
            k = total - j
            if np.intersect1d(left[j - 1], right[k - 1], assume_unique=True).size:
                return total
    raise AssertionError("I_1 and I'_1 must intersect at the midpoint")
