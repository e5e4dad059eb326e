"""Cut times and the series decomposition of distance and resistance.

A cut time separates the past of the walk from its future; the corresponding
step edge is a bridge of the trace graph. Distances and resistances add in
series across those bridges, which this script verifies numerically, and the
cut-time density follows the n/sqrt(log n) profile.
"""
import math

import walktrace as wt

n = 20000
walk = wt.generate_walk(4, n, seed=7)
cuts = wt.find_cut_times(walk, n)
print(f"n={n}: {cuts.count} cut times "
      f"(density * sqrt(log n): {cuts.count * math.sqrt(math.log(n)) / n:.4f})")

g = wt.build_trace(walk, 0, n)
d_n = wt.graph_distance(g, g.origin_id, g.terminal_id)
r_n = wt.effective_resistance(g, g.origin_id, g.terminal_id, method="direct").value
print(f"direct measurement: D_n={d_n}, R_n={r_n:.3f}, cuts={cuts.count}")
print(f"sandwich: {cuts.count} <= {r_n:.3f} <= {d_n}")

segments = wt.bridge_decomposition(walk, n, method="direct")
d_sum = sum(s.distance for s in segments)
r_sum = sum(s.resistance for s in segments)
print(f"{len(segments)} series segments: sum of distances = {d_sum} "
      f"(exact match: {d_sum == d_n})")
print(f"sum of resistances = {r_sum:.3f} "
      f"(relative gap {abs(r_sum - r_n) / r_n:.2e})")

# density across scales: E(C_n) ~ c n / sqrt(log n), c stable
print("\ncut density across horizons (100 walks each):")
for e in range(10, 15):
    m = 2**e
    total = sum(wt.find_cut_times(wt.generate_walk(4, m, seed=100 * e + i), m).count
                for i in range(100))
    c = (total / 100) * math.sqrt(math.log(m)) / m
    print(f"  n=2^{e}: c = {c:.4f}")
