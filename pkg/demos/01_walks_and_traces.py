"""Walks, trace graphs, and the two endpoint observables.

Generates seeded walks on Z^4, builds the trace graph of a segment, and
measures the graph distance and effective resistance between the endpoints,
including the dense-oracle cross-check and the edge-list dump format.
"""
import tempfile

import walktrace as wt

# a reproducible 4-dimensional walk: same (d, n, seed) -> identical path
walk = wt.generate_walk(d=4, n=20000, seed=42)
print(f"walk: {walk.n_steps} steps, endpoint {tuple(int(c) for c in walk.points[-1])}")

g = wt.build_trace(walk, 0, 20000)
print(f"trace graph: {g.vertex_count} vertices, {g.edge_count} edges "
      f"(<= n+1 and n by deduplication)")

d = wt.graph_distance(g, g.origin_id, g.terminal_id)
print(f"graph distance D_n = {d}  (D_n/n = {d / 20000:.3f})")

res = wt.effective_resistance(g, g.origin_id, g.terminal_id, tol=1e-8)
print(f"effective resistance R_n = {res.value:.2f} "
      f"(residual {res.residual:.1e}, {res.iterations} CG iterations)")
print(f"sandwich holds: R <= D: {res.value <= d + 1e-6}")

# small graphs can be cross-checked against a dense direct solve
small = wt.build_trace(walk, 0, 150)
if small.origin_id != small.terminal_id:
    fast = wt.effective_resistance(small, small.origin_id, small.terminal_id)
    exact = wt.resistance_dense_oracle(small, small.origin_id, small.terminal_id)
    print(f"dense oracle check on a 150-step segment: "
          f"{fast.value:.10f} vs {exact:.10f}")

with tempfile.NamedTemporaryFile("r", suffix=".txt", delete=False) as fh:
    wt.dump_edge_list(small, fh.name)
    header = open(fh.name).readline().strip()
print(f"edge-list dump header: {header}")
