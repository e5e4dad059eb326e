"""Trace graphs of walk segments: construction, graph distance, resistance.

The trace graph of a path segment has one vertex per distinct visited site and
one edge per distinct unordered pair of consecutively visited sites (a simple
graph: repeated traversals of the same edge contribute a single unit resistor).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray
from scipy.sparse.linalg import cg, splu

from . import _keys as _keys_mod
from ._bfs import bfs_distance
from ._keys import point_keys
from .errors import CapacityError, NumericalError, ParameterError
from .walks import WalkPath

DENSE_ORACLE_MAX_VERTICES = 2000
_AMG_MIN_VERTICES = 1500


@dataclass(frozen=True)
class TraceGraph:
    """Deduplicated vertex/edge structure of a path segment.

    Vertices carry dense ids 0..vertex_count-1 in key-sorted order; adjacency
    is CSR over those ids. `origin_id`/`terminal_id` are the ids of the first
    and last points of the segment.
    """

    vertices: NDArray[np.int32]        # (V, d) unique points, key-sorted
    indptr: NDArray[np.int64]
    indices: NDArray[np.int32]
    edge_u: NDArray[np.int32]          # deduplicated edges, u < v
    edge_v: NDArray[np.int32]
    origin_id: int
    terminal_id: int
    _keys: NDArray = field(repr=False)  # sorted keys parallel to `vertices`

    @property
    def vertex_count(self) -> int:
        return self.vertices.shape[0]

    @property
    def edge_count(self) -> int:
        return self.edge_u.shape[0]

    def vertex_id(self, point) -> int:
        """Dense id of a lattice point; raises KeyError if not in the trace."""
        pt = np.asarray(point, dtype=np.int32).reshape(1, -1)
        if pt.shape[1] != self.vertices.shape[1]:
            raise KeyError(f"point dimension {pt.shape[1]} does not match the trace")
        if self._keys.dtype == np.int64:
            if not _keys_mod._packable(pt):
                raise KeyError(f"point {tuple(int(c) for c in pt[0])} not in trace")
            key = _keys_mod._pack_int64(pt)[0]
            i = int(np.searchsorted(self._keys, key))
            if i >= self._keys.size or self._keys[i] != key:
                raise KeyError(f"point {tuple(int(c) for c in pt[0])} not in trace")
            return i
        # void keys: byte-equality scan (rare wide-coordinate path)
        key = _keys_mod._pack_void(pt)[0]
        hits = np.flatnonzero(self._keys == key)
        if hits.size == 0:
            raise KeyError(f"point {tuple(int(c) for c in pt[0])} not in trace")
        return int(hits[0])


@dataclass(frozen=True)
class ResistanceResult:
    """Effective resistance from one Laplacian solve."""

    value: float
    residual: float
    iterations: int


def build_trace(path: WalkPath, m: int, n: int) -> TraceGraph:
    """Trace graph of path[m..n] (inclusive endpoints).

    Vertex set: distinct points of the segment. Edge set: distinct unordered
    consecutive pairs. origin/terminal mark S(m) and S(n).
    """
    if not (0 <= m <= n <= path.n_steps):
        raise IndexError(f"segment [{m}, {n}] out of range for path of {path.n_steps} steps")
    pts = path.points[m:n + 1]
    keys = point_keys(pts)
    uniq_keys, first_idx, ids = np.unique(keys, return_index=True, return_inverse=True)
    ids = ids.astype(np.int64, copy=False)
    n_vertices = uniq_keys.size

    if n > m:
        u = ids[:-1]
        v = ids[1:]
        ekeys = np.unique((np.minimum(u, v) << 32) | np.maximum(u, v))
        edge_u = (ekeys >> 32).astype(np.int32)
        edge_v = (ekeys & 0xFFFFFFFF).astype(np.int32)
    else:
        edge_u = np.empty(0, np.int32)
        edge_v = np.empty(0, np.int32)

    rows = np.concatenate([edge_u, edge_v])
    cols = np.concatenate([edge_v, edge_u])
    order = np.argsort(rows, kind="stable")
    indices = cols[order].astype(np.int32, copy=False)
    indptr = np.zeros(n_vertices + 1, np.int64)
    np.cumsum(np.bincount(rows, minlength=n_vertices), out=indptr[1:])

    return TraceGraph(
        vertices=pts[first_idx].astype(np.int32, copy=False),
        indptr=indptr,
        indices=indices,
        edge_u=edge_u,
        edge_v=edge_v,
        origin_id=int(ids[0]),
        terminal_id=int(ids[-1]),
        _keys=uniq_keys,
    )


def graph_distance(g: TraceGraph, u: int, v: int) -> int:
    """Length of the shortest path between vertex ids u and v."""
    nv = g.vertex_count
    if not (0 <= u < nv and 0 <= v < nv):
        raise IndexError(f"vertex id out of range (V={nv})")
    d = int(bfs_distance(g.indptr, g.indices, np.int64(u), np.int64(v), np.int64(nv)))
    if d < 0:
        # A path trace is always connected; reaching this means a broken graph.
        raise NumericalError(f"vertices {u} and {v} are disconnected")
    return d


def _grounded_laplacian(g: TraceGraph, ground: int):
    nv = g.vertex_count
    rows = np.concatenate([g.edge_u, g.edge_v])
    cols = np.concatenate([g.edge_v, g.edge_u])
    data = np.full(rows.size, -1.0)
    adj = sp.coo_matrix((data, (rows, cols)), shape=(nv, nv)).tocsr()
    degrees = -np.asarray(adj.sum(axis=1)).ravel()
    lap = adj + sp.diags(degrees)
    keep = np.ones(nv, bool)
    keep[ground] = False
    return lap[keep][:, keep].tocsr()


def effective_resistance(g: TraceGraph, u: int, v: int, tol: float = 1e-8,
                         method: str = "pcg") -> ResistanceResult:
    """Effective resistance between u and v with unit resistors on each edge.

    Solves the grounded-Laplacian potential problem (unit current injected at
    u, extracted at v, potential grounded at v). `method`:

    * ``"pcg"``  - conjugate gradient, AMG-preconditioned on large graphs.
      The solver targets a residual two decades below `tol` so that the
      resistance value itself is accurate to ~tol; the guarantee checked on
      exit is relative residual <= tol.
    * ``"direct"`` - sparse LU factorization (fast on path-like traces;
      iterations reported as 0).
    """
    if u == v:
        raise ParameterError("effective resistance requires two distinct vertices")
    if tol <= 0:
        raise ParameterError("tol must be positive")
    nv = g.vertex_count
    if not (0 <= u < nv and 0 <= v < nv):
        raise IndexError(f"vertex id out of range (V={nv})")

    lap_g = _grounded_laplacian(g, ground=v)
    b = np.zeros(nv - 1)
    u_g = u - 1 if u > v else u
    b[u_g] = 1.0

    if method == "direct":
        x = splu(lap_g.tocsc()).solve(b)
        iterations = 0
    elif method == "pcg":
        precond = None
        if nv >= _AMG_MIN_VERTICES:
            import pyamg

            precond = pyamg.smoothed_aggregation_solver(lap_g).aspreconditioner()
        count = [0]

        def _cb(_xk):
            count[0] += 1

        maxiter = int(50 * np.sqrt(nv)) + 1000
        x, info = cg(lap_g, b, rtol=max(tol * 1e-2, 1e-14), atol=0.0,
                     maxiter=maxiter, M=precond, callback=_cb)
        iterations = count[0]
        if info < 0:
            raise NumericalError("conjugate gradient breakdown", iterations=iterations)
    else:
        raise ParameterError(f"unknown method {method!r}")

    residual = float(np.linalg.norm(lap_g @ x - b))  # ||b|| = 1
    if residual > tol:
        raise NumericalError(
            f"Laplacian solve stalled at relative residual {residual:.3e} > tol {tol:.1e}",
            residual=residual, iterations=iterations)
    return ResistanceResult(value=float(x[u_g]), residual=residual, iterations=iterations)


def _dense_resistance(g: TraceGraph, u: int, v: int) -> float:
    """Grounded-Laplacian solve in dense arithmetic (exact up to rounding)."""
    nv = g.vertex_count
    lap = np.zeros((nv, nv))
    eu = g.edge_u.astype(np.int64)
    ev = g.edge_v.astype(np.int64)
    lap[eu, ev] -= 1.0
    lap[ev, eu] -= 1.0
    np.fill_diagonal(lap, -lap.sum(axis=1))
    keep = np.arange(nv) != v
    lap_g = lap[np.ix_(keep, keep)]
    b = np.zeros(nv - 1)
    b[u - 1 if u > v else u] = 1.0
    x = np.linalg.solve(lap_g, b)
    return float(x[u - 1 if u > v else u])


def resistance_dense_oracle(g: TraceGraph, u: int, v: int) -> float:
    """Exact effective resistance via a dense grounded-Laplacian solve.

    Verification oracle, independent of the sparse/iterative code path.
    Limited to small graphs.
    """
    nv = g.vertex_count
    if nv > DENSE_ORACLE_MAX_VERTICES:
        raise CapacityError(
            f"dense oracle limited to {DENSE_ORACLE_MAX_VERTICES} vertices, got {nv}")
    if u == v:
        raise ParameterError("effective resistance requires two distinct vertices")
    return _dense_resistance(g, u, v)


def dump_edge_list(g: TraceGraph, path) -> None:
    """Write the graph as text: a header line, then one 'u v' pair per line."""
    with open(path, "w") as fh:
        fh.write(f"# vertices={g.vertex_count} edges={g.edge_count} "
                 f"origin={g.origin_id} terminal={g.terminal_id}\n")
        for a, b in zip(g.edge_u, g.edge_v):
            fh.write(f"{a} {b}\n")
