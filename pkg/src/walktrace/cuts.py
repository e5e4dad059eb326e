"""Cut times of a walk segment and the series decomposition they induce.

A time k is a cut time up to n when the point sets S[0,k] and S[k+1,n] are
disjoint. The step edge {S(k), S(k+1)} is then the unique edge joining the two
sides, i.e. a bridge of the trace graph, so distances and resistances add in
series across cut times.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from ._keys import point_keys
from .errors import ParameterError
from .trace import (_dense_resistance, build_trace, effective_resistance,
                    graph_distance)
from .walks import WalkPath

Convention = Literal["exclude_k_eq_n", "include_k_eq_n"]

# k = n is vacuously a cut time (S[n+1,n] is empty). Counting it would break
# the chain cut_count <= R_n on self-avoiding paths (straight path: n+1 > n),
# so the excluding convention is the default everywhere.
DEFAULT_CONVENTION: Convention = "exclude_k_eq_n"


@dataclass(frozen=True)
class CutTimeSet:
    """Sorted cut times of path[0..n] under a boundary convention."""

    times: NDArray[np.int64]
    n: int
    convention: Convention

    @property
    def count(self) -> int:
        return self.times.size


@dataclass(frozen=True)
class BridgeSegment:
    """One piece of the series decomposition, spanning path[start..end].

    For every segment except a possible leading one, path(start) is a cut
    point and the segment's first edge is the corresponding bridge, which
    contributes 1 to both distance and resistance.
    """

    start: int
    end: int
    distance: int
    resistance: float


def find_cut_times(path: WalkPath, n: int,
                   convention: Convention = DEFAULT_CONVENTION) -> CutTimeSet:
    """All k in [0, n] with S[0,k] and S[k+1,n] disjoint, in O(n).

    k is a cut time iff max_{j<=k} lastVisit(S(j)) <= k, where lastVisit is the
    final visit time of a site within [0, n]; the maxima are prefix maxima of a
    single last-visit sweep.
    """
    if not 0 <= n <= path.n_steps:
        raise IndexError(f"n={n} out of range for path of {path.n_steps} steps")
    if convention not in ("exclude_k_eq_n", "include_k_eq_n"):
        raise ParameterError(f"unknown convention {convention!r}")
    keys = point_keys(path.points[:n + 1])
    uniq, ids = np.unique(keys, return_inverse=True)
    idx = np.arange(n + 1, dtype=np.int64)
    last_visit = np.empty(uniq.size, dtype=np.int64)
    last_visit[ids] = idx           # duplicate indices: the last write wins
    prefix_max = np.maximum.accumulate(last_visit[ids])
    times = np.flatnonzero(prefix_max == idx).astype(np.int64)
    if convention == "exclude_k_eq_n" and times.size and times[-1] == n:
        times = times[:-1]
    return CutTimeSet(times=times, n=n, convention=convention)


def find_cut_times_bruteforce(path: WalkPath, n: int,
                              convention: Convention = DEFAULT_CONVENTION) -> CutTimeSet:
    """O(n^2) oracle: literal set intersection of prefix and suffix points."""
    if not 0 <= n <= path.n_steps:
        raise IndexError(f"n={n} out of range for path of {path.n_steps} steps")
    pts = [tuple(int(c) for c in row) for row in path.points[:n + 1]]
    prefix = set()
    times = []
    for k in range(n + 1):
        prefix.add(pts[k])
        if not any(p in prefix for p in pts[k + 1:]):
            times.append(k)
    if convention == "exclude_k_eq_n" and times and times[-1] == n:
        times.pop()
    return CutTimeSet(times=np.asarray(times, dtype=np.int64), n=n, convention=convention)


def bridge_decomposition(path: WalkPath, n: int, tol: float = 1e-8,
                         method: str = "pcg") -> list[BridgeSegment]:
    """Partition path[0..n] at its cut times and measure each piece.

    Segments run cut-to-cut, each including its leading bridge edge; a leading
    bridge-free segment appears when 0 is not a cut time, and the whole trace
    is a single segment when there are no cut times. Segment distances sum to
    D_n exactly and segment resistances to R_n up to solver tolerance.
    """
    if n < 1:
        raise ParameterError("bridge decomposition needs at least one step")
    cuts = find_cut_times(path, n, "exclude_k_eq_n").times
    bounds = []
    if cuts.size == 0:
        bounds.append((0, n))
    else:
        if cuts[0] > 0:
            bounds.append((0, int(cuts[0])))
        for i in range(cuts.size - 1):
            bounds.append((int(cuts[i]), int(cuts[i + 1])))
        bounds.append((int(cuts[-1]), n))

    segments = []
    for a, b in bounds:
        g = build_trace(path, a, b)
        if g.origin_id == g.terminal_id:
            seg = BridgeSegment(start=a, end=b, distance=0, resistance=0.0)
        else:
            dist = graph_distance(g, g.origin_id, g.terminal_id)
            if g.vertex_count <= 64:
                # typical segments are tiny; a dense grounded solve avoids
                # per-segment sparse-solver overhead
                res = _dense_resistance(g, g.origin_id, g.terminal_id)
            else:
                res = effective_resistance(g, g.origin_id, g.terminal_id,
                                           tol=tol, method=method).value
            seg = BridgeSegment(start=a, end=b, distance=dist, resistance=res)
        segments.append(seg)
    return segments
