"""Numba BFS kernel over CSR adjacency."""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def bfs_distance(indptr, indices, src, dst, n_vertices):  # pragma: no cover - jitted
    """Unweighted shortest-path distance from src to dst; -1 if unreachable.

    Frontier arrays are sized by the vertex count; distances are 32-bit.
    """
    dist = np.full(n_vertices, -1, np.int32)
    frontier = np.empty(n_vertices, np.int32)
    nxt = np.empty(n_vertices, np.int32)
    dist[src] = 0
    if src == dst:
        return np.int32(0)
    frontier[0] = src
    n_frontier = 1
    level = np.int32(0)
    while n_frontier > 0:
        level += 1
        n_next = 0
        for fi in range(n_frontier):
            u = frontier[fi]
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if dist[v] < 0:
                    if v == dst:
                        return level
                    dist[v] = level
                    nxt[n_next] = v
                    n_next += 1
        frontier, nxt = nxt, frontier
        n_frontier = n_next
    return np.int32(-1)
