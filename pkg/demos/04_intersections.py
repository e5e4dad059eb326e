"""Walk-intersection probabilities against their leading-order predictions.

Estimates the long-range intersection probability f(n;k) and the three-walk
non-intersection probability P(F_n) by seeded Monte Carlo, and shows the
midpoint interval scheme with its shortcut statistic L.
"""
import math

import walktrace as wt

print("long-range intersection f(n;k) = P(S1[0,n] meets S2[kn,(k+1)n]):")
n = 1024
for k in (2, 3):
    est = wt.estimate_f(n, k, trials=30000, seed=4)
    pred = wt.f_prediction(n, k)
    print(f"  n={n}, k={k}: {est.mean:.5f} +- {est.stderr:.5f}  "
          f"leading order {pred:.5f}  (ratio {est.mean / pred:.2f})")

print("\nthree-walk non-intersection P(F_n), scaled by (8/pi^2) log n -> 1:")
for e in (8, 10, 12):
    m = 2**e
    est = wt.estimate_F(m, trials=20000, seed=5)
    scaled = est.mean * (8 / math.pi**2) * math.log(m)
    print(f"  n=2^{e}: {est.mean:.5f} +- {est.stderr:.5f}   scaled {scaled:.3f}")

print("\nexact enumeration oracle at n=1:")
exact = wt.enumerate_F1_exact()
est = wt.estimate_F(1, trials=50000, seed=6)
print(f"  enumeration {exact:.6f} = 49/64, Monte Carlo {est.mean:.6f} +- {est.stderr:.6f}")

print("\ninterval scheme and the shortcut statistic L:")
m = 2**14
scheme = wt.interval_scheme(m)
print(f"  n=2^14: {scheme.count} intervals of length ~{scheme.a:.0f}, "
      f"t_0 = t'_0 = {scheme.t[0]}")
counts = {}
for seed in range(200):
    walk = wt.generate_walk(4, m, seed=seed)
    l_val = wt.longest_intersection_L(walk, scheme)
    counts[l_val] = counts.get(l_val, 0) + 1
print("  distribution of L over 200 walks:",
      {k: counts[k] for k in sorted(counts)})
print("  (L >= 2 always: the two innermost intervals share the midpoint)")
