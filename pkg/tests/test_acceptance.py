"""Acceptance gate: every criterion of the build contract, one test each.

Run with `pytest tests/test_acceptance.py -v -s` to see a pass/fail line per
criterion. Heavy Monte Carlo batches are shared through session fixtures.
"""
import math
import time

import numpy as np
import pytest

from walktrace import (ExperimentConfig, ExperimentOptions, EstimateRecord,
                       auto_radius, bridge_decomposition, build_trace,
                       doubling_check, effective_resistance, estimate_F,
                       estimate_f, extrapolate_constant, f_prediction,
                       find_cut_times, find_cut_times_bruteforce, gap_consistency,
                       generate_walk, graph_distance, green_table, psi_series,
                       resistance_dense_oracle, return_probability, run_experiment,
                       run_trial, write_records_jsonl, write_summary_csv)

pytestmark = [pytest.mark.acceptance, pytest.mark.slow]

MASTER = 20250810
A4 = 8.0 / math.pi ** 2


def report(cid, ok: bool, detail: str) -> None:
    print(f"\n[criterion {cid!s:>6}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {cid}: {detail}"


# ---------------------------------------------------------------------------
# shared heavy runs

@pytest.fixture(scope="session")
def psi_grid_records():
    """Grid 2^10..2^18, 10^3 trials per point, distance/cuts only."""
    cfg = ExperimentConfig(grid=tuple(2**m for m in range(10, 19)),
                           trials=1000, master_seed=MASTER, workers=2,
                           options=ExperimentOptions(measure_resistance=False))
    t0 = time.perf_counter()
    records = run_experiment(cfg)
    print(f"\n[grid 2^10..2^18 x 1000 trials took {time.perf_counter() - t0:.0f}s]")
    return records


@pytest.fixture(scope="session")
def doubling_records():
    """2^16 and 2^17 at 10^4 trials each; streams are independent per n."""
    cfg = ExperimentConfig(grid=(2**16, 2**17), trials=10**4,
                           master_seed=MASTER + 1, workers=2,
                           options=ExperimentOptions(measure_resistance=False))
    t0 = time.perf_counter()
    records = run_experiment(cfg)
    print(f"\n[doubling batches took {time.perf_counter() - t0:.0f}s]")
    return records


# ---------------------------------------------------------------------------

def test_criterion_01_sandwich():
    t0 = time.perf_counter()
    worst = None
    for n in (10**3, 10**4, 10**5):
        for i in range(1000):
            r = run_trial(n, seed=(MASTER * 7 + n + i))
            ok = (r.cut_count <= r.resistance + 1e-6
                  and r.resistance <= r.distance + 1e-6
                  and r.distance <= n)
            if not ok:
                worst = (n, i, r.cut_count, r.resistance, r.distance)
                break
        if worst:
            break
    report(1, worst is None,
           f"cut<=R<=D<=n held in 3000/3000 trials at n in (1e3,1e4,1e5) "
           f"[{time.perf_counter() - t0:.0f}s]" if worst is None
           else f"violated at {worst}")


def test_criterion_02_resistance_oracle():
    t0 = time.perf_counter()
    checked = 0
    max_rel = 0.0
    seed = 0
    while checked < 200:
        seed += 1
        path = generate_walk(4, 210, seed=MASTER + seed)
        g = build_trace(path, 0, 210)
        if g.vertex_count > 200 or g.origin_id == g.terminal_id:
            continue
        got = effective_resistance(g, g.origin_id, g.terminal_id, tol=1e-8).value
        want = resistance_dense_oracle(g, g.origin_id, g.terminal_id)
        max_rel = max(max_rel, abs(got - want) / want)
        checked += 1
    report(2, max_rel <= 1e-8,
           f"PCG vs dense oracle on 200 graphs (<=200 vertices): "
           f"max rel err {max_rel:.2e} <= 1e-8 [{time.perf_counter() - t0:.0f}s]")


def test_criterion_03_cut_time_oracle():
    t0 = time.perf_counter()
    mismatches = 0
    for i in range(100):
        n = 2000 - 17 * i if i > 2 else (1, 2, 3)[i]
        path = generate_walk(4, n, seed=MASTER + 31 * i)
        fast = find_cut_times(path, n)
        slow = find_cut_times_bruteforce(path, n)
        if fast.times.tolist() != slow.times.tolist():
            mismatches += 1
    report(3, mismatches == 0,
           f"O(n) scan == O(n^2) brute force on 100 walks (n <= 2000), "
           f"{mismatches} mismatches [{time.perf_counter() - t0:.0f}s]")


def test_criterion_04_bridge_additivity():
    t0 = time.perf_counter()
    n = 10**4
    max_d_err = 0
    max_r_rel = 0.0
    for i in range(200):
        path = generate_walk(4, n, seed=MASTER + 997 * i)
        g = build_trace(path, 0, n)
        d_n = graph_distance(g, g.origin_id, g.terminal_id)
        r_n = effective_resistance(g, g.origin_id, g.terminal_id,
                                   method="direct").value
        segs = bridge_decomposition(path, n, method="direct")
        max_d_err = max(max_d_err, abs(sum(s.distance for s in segs) - d_n))
        max_r_rel = max(max_r_rel,
                        abs(sum(s.resistance for s in segs) - r_n) / r_n)
    report(4, max_d_err == 0 and max_r_rel <= 1e-6,
           f"series decomposition on 200 walks at n=1e4: distance exact "
           f"(max err {max_d_err}), resistance max rel {max_r_rel:.2e} <= 1e-6 "
           f"[{time.perf_counter() - t0:.0f}s]")


def test_criterion_05_green_conservation():
    t0 = time.perf_counter()
    rows = []
    ok = True
    for lam in (0.5, 0.9, 0.99, 1.0 - 2.0**-10):
        table = green_table(lam, radius=auto_radius(lam))
        total = table.total()
        target = 1.0 / (1.0 - lam)
        dev = abs(total - target)
        good = dev <= table.truncation_bound and total <= target * (1 + 1e-12)
        ok = ok and good
        rows.append(f"lam={lam:g}: |dev|={dev:.3e} <= bound={table.truncation_bound:.3e}")
    report(5, ok, "; ".join(rows) + f" [{time.perf_counter() - t0:.0f}s]")


def test_criterion_06_local_clt_constant():
    t0 = time.perf_counter()
    vals = {}
    for m2 in range(24, 42, 2):
        vals[m2] = return_probability(m2) * m2 * m2 / A4
    ok = all(0.9 <= v <= 1.1 for v in vals.values())
    report(6, ok,
           "p_{2m}(0)*(2m)^2*pi^2/8 in [0.9,1.1] for 2m=24..40: "
           + ", ".join(f"{v:.3f}" for v in vals.values())
           + f" [{time.perf_counter() - t0:.0f}s]")


def test_criterion_07_aggregate_slope():
    t0 = time.perf_counter()
    from walktrace import expected_G_aggregate

    e = {m: expected_G_aggregate(1.0 - 2.0**-m) for m in range(6, 11)}
    slopes = [(e[m + 1] - e[m]) / math.log(2.0) for m in range(6, 10)]
    ok = all(abs(s - A4) <= 0.15 * A4 for s in slopes)
    report(7, ok,
           "dE/d(-log(1-lam)) over lam=1-2^-m, m=6..10: "
           + ", ".join(f"{s:.4f}" for s in slopes)
           + f" (target {A4:.4f} +-15%) [{time.perf_counter() - t0:.0f}s]")


def test_criterion_08_long_range_band():
    t0 = time.perf_counter()
    n, trials = 4096, 4 * 10**5
    e2 = estimate_f(n, 2, trials=trials, seed=MASTER + 82)
    e3 = estimate_f(n, 3, trials=trials, seed=MASTER + 83)
    msgs, ok = [], True
    for est, k in ((e2, 2), (e3, 3)):
        pred = f_prediction(n, k)
        inside = abs(est.mean - pred) <= 0.40 * pred
        ok = ok and inside
        msgs.append(f"k={k}: {est.mean:.5f} vs pred {pred:.5f} "
                    f"(ratio {est.mean / pred:.2f})")
    sep = e2.mean - e3.mean > 3 * math.hypot(e2.stderr, e3.stderr)
    ok = ok and sep
    msgs.append(f"k=3 below k=2 beyond 3 stderr: {sep}")
    report(8, ok, "; ".join(msgs) + f" [{time.perf_counter() - t0:.0f}s]")


def test_criterion_09_three_walk_band():
    t0 = time.perf_counter()
    means = {}
    msgs, ok = [], True
    for e in (10, 12, 14):
        est = estimate_F(2**e, trials=10**5, seed=MASTER + e)
        means[e] = est.mean
        scaled = est.mean * A4 * math.log(2.0**e)
        inside = 0.5 <= scaled <= 1.6
        ok = ok and inside
        msgs.append(f"n=2^{e}: P={est.mean:.5f}, P*(8/pi^2)*log n={scaled:.3f}")
    decreasing = means[10] > means[12] > means[14]
    ok = ok and decreasing
    msgs.append(f"decreasing in n: {decreasing}")
    report(9, ok, "; ".join(msgs) + f" [{time.perf_counter() - t0:.0f}s]")


def test_criterion_10_triangle_gap():
    t0 = time.perf_counter()
    n = 2**14
    opts = ExperimentOptions(measure_resistance=False)
    gap_batch = run_experiment(ExperimentConfig(
        grid=(n,), trials=10**4, master_seed=MASTER + 101, workers=2, options=opts))
    d_half = run_experiment(ExperimentConfig(
        grid=(n // 2,), trials=10**4, master_seed=MASTER + 102, workers=2, options=opts))
    d_full = run_experiment(ExperimentConfig(
        grid=(n,), trials=10**4, master_seed=MASTER + 103, workers=2, options=opts))
    records = ([r for r in gap_batch if r.quantity == "gap_mean"]
               + [r for r in d_half if r.quantity == "D_mean"]
               + [r for r in d_full if r.quantity == "D_mean"])
    rows = gap_consistency(records)
    assert len(rows) == 1
    row = rows[0]
    ok = abs(row.z) <= 3.0
    report(10, ok,
           f"gap mean {row.gap_mean:.2f} vs n*(psi(n/2)-psi(n)) = {row.indirect:.2f}, "
           f"|z| = {abs(row.z):.2f} <= 3 (every trial gap >= 0 enforced in run_trial) "
           f"[{time.perf_counter() - t0:.0f}s]")


def test_criterion_11_psi_stability(psi_grid_records):
    series = psi_series(psi_grid_records)
    scaled = series.psi * np.sqrt(np.log(series.n.astype(float)))
    decreasing = bool((np.diff(series.psi) < 0).all())
    spread = float(scaled.max() / scaled.min())
    ok = decreasing and spread <= 1.30
    report(11, ok,
           f"psi decreasing: {decreasing}; psi*sqrt(log n) spread "
           f"max/min = {spread:.3f} <= 1.30 over 2^10..2^18")


def test_criterion_11_variance_trend(psi_grid_records):
    # relative variance Var(D_n)/mean(D_n)^2 trends down, 2-stderr violations allowed
    dmean = {r.n: r for r in psi_grid_records if r.quantity == "D_mean"}
    dvar = {r.n: r for r in psi_grid_records if r.quantity == "D_var"}
    ns = sorted(dmean)
    rel = {n: dvar[n].mean / dmean[n].mean ** 2 for n in ns}
    rel_se = {n: dvar[n].stderr / dmean[n].mean ** 2 for n in ns}
    ok = True
    for a, b in zip(ns, ns[1:]):
        slack = 2.0 * math.hypot(rel_se[a], rel_se[b])
        if rel[b] > rel[a] + slack:
            ok = False
    vals = ", ".join(f"{rel[n]:.4f}" for n in ns)
    report("11-var", ok, f"relative variance of D_n across the grid: {vals} "
                   f"(monotone trend within 2 stderr)")


def test_criterion_11_cut_density_stability(psi_grid_records):
    cut = {r.n: r for r in psi_grid_records if r.quantity == "cut_mean"}
    dmean = {r.n: r for r in psi_grid_records if r.quantity == "D_mean"}
    ns = sorted(cut)
    density = np.array([cut[n].mean * math.sqrt(math.log(n)) / n for n in ns])
    psi_cut_ok = all(cut[n].mean <= dmean[n].mean for n in ns)
    ok = bool((density > 0).all()) and density.max() / density.min() < 2.0 and psi_cut_ok
    report("11-cut", ok,
           f"cut density c_n = E(C_n) sqrt(log n)/n in "
           f"[{density.min():.4f}, {density.max():.4f}] (ratio "
           f"{density.max() / density.min():.2f} < 2), cut mean <= D mean: {psi_cut_ok}")


def test_criterion_12_doubling_relation(doubling_records):
    series = psi_series(doubling_records)
    rows = doubling_check(series)
    assert len(rows) == 1 and rows[0].n == 2**16
    row = rows[0]
    ok = abs(row.z) <= 4.0
    report(12, ok,
           f"psi(2^17)/psi(2^16) = {row.ratio:.5f} vs predicted {row.predicted:.5f} "
           f"(stderr {row.stderr:.5f}): |z| = {abs(row.z):.2f} <= 4")


def test_constant_ordering_resistance_below_distance():
    # the resistance constant cannot exceed the distance constant
    t0 = time.perf_counter()
    cfg = ExperimentConfig(grid=tuple(2**m for m in range(10, 14)), trials=300,
                           master_seed=MASTER + 131, workers=2)
    series = psi_series(run_experiment(cfg))
    fit_d = extrapolate_constant(series)
    fit_r = extrapolate_constant(series, use_resistance=True)
    report("order", fit_r.a_hat <= fit_d.a_hat,
           f"a_hat(resistance) = {fit_r.a_hat:.4f} <= a_hat(distance) = {fit_d.a_hat:.4f} "
           f"[{time.perf_counter() - t0:.0f}s]")


def test_criterion_13_extrapolation_fixtures():
    t0 = time.perf_counter()
    # fixture A: psi(n) = (log n)^{-1/2} (1 + (log n)^{-1}), grid m = 14..20
    rec_a = [EstimateRecord("D_mean", 2**m,
                            2**m * math.log(2**m) ** -0.5 * (1 + 1 / math.log(2**m)),
                            1e-9, 1000, 0) for m in range(14, 21)]
    fit_a = extrapolate_constant(psi_series(rec_a))
    ok_a = abs(fit_a.a_hat - 1.0) <= 0.02
    # fixture B: psi(2^m) = e^0 m^{-1/2}
    rec_b = [EstimateRecord("D_mean", 2**m, 2**m * m ** -0.5, 1e-9, 1000, 0)
             for m in range(10, 18)]
    fit_b = extrapolate_constant(psi_series(rec_b))
    ok_b = abs(fit_b.a_hat - math.sqrt(math.log(2.0))) <= 1e-12
    report(13, ok_a and ok_b,
           f"fixture A: a_hat = {fit_a.a_hat:.4f} (within 2% of 1: {ok_a}); "
           f"fixture B: a_hat = {fit_b.a_hat!r} = sqrt(log 2) to machine precision: {ok_b} "
           f"[{time.perf_counter() - t0:.1f}s]")


def test_criterion_14_determinism(tmp_path):
    t0 = time.perf_counter()
    cfg = dict(grid=(2**10,), trials=100, master_seed=MASTER + 141)
    outputs = []
    for workers in (1, 2, 3):
        records = run_experiment(ExperimentConfig(workers=workers, **cfg))
        jsonl = tmp_path / f"w{workers}.jsonl"
        csv = tmp_path / f"w{workers}.csv"
        write_records_jsonl(jsonl, records)
        write_summary_csv(csv, records)
        outputs.append((jsonl.read_bytes(), csv.read_bytes()))
    rerun = run_experiment(ExperimentConfig(workers=1, **cfg))
    j2 = tmp_path / "rerun.jsonl"
    write_records_jsonl(j2, rerun)
    ok = (outputs[0] == outputs[1] == outputs[2]
          and j2.read_bytes() == outputs[0][0])
    report(14, ok,
           f"records and CSV byte-identical across worker counts 1/2/3 and rerun "
           f"[{time.perf_counter() - t0:.0f}s]")
