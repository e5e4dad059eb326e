"""Collision-free packing of lattice points into sortable keys.

Dense vertex ids, cut-time scans and intersection tests all reduce to exact
equality of lattice points. Points are packed into one int64 key (four 16-bit
fields, fixed offset) whenever every coordinate fits; otherwise the raw bytes
of the coordinate row serve as the key. Both packings are injective, and the
fixed offset keeps keys comparable across calls, so sets from different paths
can be intersected directly.
"""
from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

_OFFSET = 1 << 15  # coordinates in (-2**15, 2**15) pack into 16-bit fields


def _packable(points: NDArray) -> bool:
    if points.shape[1] > 4 or points.size == 0:
        return points.size == 0 and points.shape[1] <= 4
    ext = max(abs(int(points.min())), abs(int(points.max())))
    return ext < _OFFSET


def _pack_int64(points: NDArray) -> NDArray[np.int64]:
    off = points.astype(np.int64) + _OFFSET
    key = off[:, 0]
    for c in range(1, points.shape[1]):
        key = (key << 16) | off[:, c]
    return key


def _pack_void(points: NDArray) -> NDArray:
    pts = np.ascontiguousarray(points, dtype=np.int32)
    return pts.view(np.dtype((np.void, pts.shape[1] * 4))).ravel()


def point_keys(points: NDArray) -> NDArray:
    """One injective key per point row. Rows compare equal iff points do."""
    if _packable(points):
        return _pack_int64(points)
    return _pack_void(points)


def point_keys_pair(a: NDArray, b: NDArray):
    """Keys for two point sets in a single comparable key space."""
    if _packable(a) and _packable(b):
        return _pack_int64(a), _pack_int64(b)
    return _pack_void(a), _pack_void(b)
