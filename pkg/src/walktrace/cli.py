"""Command-line surface: simulate, intersect, green, fit, report.

Every command is deterministic given its effective configuration: reruns with
the same config and seed produce byte-identical files at any worker count.
Configuration comes from an optional key=value file (--config) overridden by
explicit flags; the effective configuration is echoed into the output
directory for provenance. Errors are reported as one JSON object on stderr
and the exit code: 0 ok, 2 I/O, 3 bad input, 4 numerical failure budget.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .errors import CapacityError, InputError, NumericalError, ParameterError

_EXIT_IO = 2
_EXIT_INPUT = 3
_EXIT_NUMERICAL = 4


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"kind": kind, "message": message}) + "\n")
    return code


def _parse_int_list(text: str) -> list[int]:
    """Comma-separated integers, or a dyadic range like '1024..16384'."""
    text = text.strip()
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
        if lo < 2 or lo & (lo - 1) or hi & (hi - 1) or lo > hi:
            raise InputError(f"dyadic range must span powers of 2: {text!r}")
        out = []
        n = lo
        while n <= hi:
            out.append(n)
            n *= 2
        return out
    return [int(p) for p in text.split(",") if p.strip()]


def _parse_nk_list(text: str) -> list[tuple[int, int]]:
    """Pairs like '4096:2,4096:3'."""
    pairs = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        n_s, k_s = part.split(":")
        pairs.append((int(n_s), int(k_s)))
    return pairs


def _parse_float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _parse_bool(text: str) -> bool:
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise InputError(f"not a boolean: {text!r}")


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise InputError(f"config line without '=': {line!r}")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def _effective_config(args, schema: dict[str, tuple]) -> dict:
    """defaults < config file < explicit flags; schema: key -> (parser, default)."""
    eff = {k: d for k, (_p, d) in schema.items()}
    if getattr(args, "config", None):
        for key, raw in _read_config_file(args.config).items():
            if key not in schema:
                raise InputError(f"unknown config key {key!r}")
            eff[key] = schema[key][0](raw)
    for key in schema:
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            eff[key] = schema[key][0](flag) if isinstance(flag, str) else flag
    return eff


def _require_out_dir(eff: dict) -> str:
    out = eff.get("out")
    if not out:
        raise InputError("an output directory is required (--out)")
    if not os.path.isdir(out):
        raise FileNotFoundError(f"output directory does not exist: {out}")
    return out


def _echo_config(out_dir: str, eff: dict) -> None:
    lines = []
    for key in sorted(eff):
        val = eff[key]
        if isinstance(val, list):
            val = ",".join(str(v) for v in val)
        lines.append(f"{key}={val}\n")
    with open(os.path.join(out_dir, "config.txt"), "w") as fh:
        fh.writelines(lines)


# ---------------------------------------------------------------------------
# subcommands

_SIMULATE_SCHEMA = {
    "grid": (_parse_int_list, None),
    "trials": (int, 100),
    "seed": (int, 0),
    "workers": (int, 1),
    "out": (str, None),
    "tol": (float, 1e-8),
    "resistance": (_parse_bool, True),
    "l": (_parse_bool, False),
}


def cmd_simulate(args) -> int:
    from .estimator import (ExperimentConfig, ExperimentOptions, run_experiment,
                            write_records_jsonl, write_summary_csv)

    eff = _effective_config(args, _SIMULATE_SCHEMA)
    if not eff["grid"]:
        raise InputError("simulate needs a grid (--grid)")
    out = _require_out_dir(eff)
    config = ExperimentConfig(
        grid=tuple(eff["grid"]), trials=eff["trials"], master_seed=eff["seed"],
        workers=eff["workers"],
        options=ExperimentOptions(measure_resistance=eff["resistance"],
                                  measure_l=eff["l"],
                                  resistance_tol=eff["tol"]))
    records = run_experiment(config)
    _echo_config(out, eff)
    write_records_jsonl(os.path.join(out, "records.jsonl"), records)
    write_summary_csv(os.path.join(out, "summary.csv"), records)
    print(f"wrote {len(records)} records for {len(eff['grid'])} grid points to {out}")
    return 0


_INTERSECT_SCHEMA = {
    "nk": (_parse_nk_list, []),
    "fn": (_parse_int_list, []),
    "trials": (int, 100000),
    "seed": (int, 0),
    "out": (str, None),
}


def cmd_intersect(args) -> int:
    from .intersect import big_f_prediction, estimate_F, estimate_f, f_prediction

    eff = _effective_config(args, _INTERSECT_SCHEMA)
    if not eff["nk"] and not eff["fn"]:
        raise InputError("intersect needs --nk pairs and/or --fn horizons")
    out = _require_out_dir(eff)
    rows = []
    for n, k in eff["nk"]:
        est = estimate_f(n, k, trials=eff["trials"], seed=eff["seed"])
        rows.append(("f", n, k, est.mean, est.stderr, est.trials, f_prediction(n, k)))
    for n in eff["fn"]:
        est = estimate_F(n, trials=eff["trials"], seed=eff["seed"])
        rows.append(("F", n, "", est.mean, est.stderr, est.trials, big_f_prediction(n)))
    _echo_config(out, eff)
    path = os.path.join(out, "intersect.csv")
    with open(path, "w") as fh:
        fh.write("kind,n,k,mean,stderr,trials,prediction\n")
        for kind, n, k, mean, stderr, trials, pred in rows:
            fh.write(f"{kind},{n},{k},{mean!r},{stderr!r},{trials},{pred!r}\n")
    for kind, n, k, mean, stderr, trials, pred in rows:
        label = f"f(n={n};k={k})" if kind == "f" else f"P(F_n), n={n}"
        print(f"{label:>22}: {mean:.6f} +- {stderr:.6f}   prediction {pred:.6f}")
    return 0


_GREEN_SCHEMA = {
    "lambda": (_parse_float_list, None),
    "radius": (_parse_int_list, []),
    "out": (str, None),
}


def cmd_green(args) -> int:
    from .greens import auto_radius, expected_G_aggregate, green_table

    eff = _effective_config(args, _GREEN_SCHEMA)
    lams = eff["lambda"]
    if not lams:
        raise InputError("green needs at least one killing parameter (--lambda)")
    radii = eff["radius"]
    if radii and len(radii) != len(lams):
        raise InputError("--radius list must match --lambda list")
    out = _require_out_dir(eff)
    rows = []
    for i, lam in enumerate(lams):
        radius = radii[i] if radii else auto_radius(lam)
        table = green_table(lam, radius=radius)
        total = table.total()
        target = 1.0 / (1.0 - lam)
        agg = expected_G_aggregate(lam)
        rows.append((lam, table.radius, total, target, abs(total - target),
                     table.truncation_bound, agg, -math.log(1.0 - lam)))
    _echo_config(out, eff)
    with open(os.path.join(out, "green.csv"), "w") as fh:
        fh.write("lambda,radius,sum_G,target,deviation,truncation_bound,"
                 "aggregate_E,minus_log_one_minus_lambda\n")
        for row in rows:
            lam, radius, total, target, dev, bound, agg, mll = row
            fh.write(f"{lam!r},{radius},{total!r},{target!r},{dev!r},{bound!r},"
                     f"{agg!r},{mll!r}\n")
    for lam, radius, total, target, dev, bound, agg, mll in rows:
        ok = "ok" if dev <= bound else "VIOLATION"
        print(f"lambda={lam}: sum G={total:.6f} target={target:.6f} "
              f"|dev|={dev:.3e} <= bound={bound:.3e} [{ok}]  "
              f"E(G^lam)={agg:.4f} at -log(1-lambda)={mll:.4f}")
    return 0


_FIT_SCHEMA = {
    "records": (str, None),
    "out": (str, ""),
}


def cmd_fit(args) -> int:
    from .estimator import (doubling_check, extrapolate_constant, psi_series,
                            read_records_jsonl)

    eff = _effective_config(args, _FIT_SCHEMA)
    path = eff["records"]
    if not path:
        raise InputError("fit needs a records.jsonl path")
    records = read_records_jsonl(path)
    series = psi_series(records)
    ns = [int(n) for n in series.n]
    full = []
    n = ns[0]
    while n <= ns[-1]:
        full.append(n)
        n *= 2
    missing = sorted(set(full) - set(ns))
    if missing:
        raise InputError(f"incomplete dyadic grid; missing n values: {missing}")

    rows = doubling_check(series)
    fit = extrapolate_constant(series)
    print("doubling relation: observed psi(2n)/psi(n) vs 1 - log2/(2 log n)")
    for r in rows:
        print(f"  n={r.n:>8}: ratio={r.ratio:.5f} predicted={r.predicted:.5f} "
              f"stderr={r.stderr:.5f} z={r.z:+.2f}")
    print(f"extrapolated constant: a_hat={fit.a_hat:.6f} "
          f"(b_hat={fit.b_hat:.6f}, c_hat={fit.c_hat:.6f})")
    print("residuals: " + " ".join(f"{v:+.2e}" for v in fit.residuals))

    if eff["out"]:
        out = _require_out_dir(eff)
        with open(os.path.join(out, "fit_doubling.csv"), "w") as fh:
            fh.write("n,ratio,predicted,stderr,z\n")
            for r in rows:
                fh.write(f"{r.n},{r.ratio!r},{r.predicted!r},{r.stderr!r},{r.z!r}\n")
        with open(os.path.join(out, "fit_extrapolation.json"), "w") as fh:
            json.dump({"a_hat": fit.a_hat, "b_hat": fit.b_hat, "c_hat": fit.c_hat,
                       "grid_m": [int(m) for m in fit.grid_m],
                       "residuals": [float(v) for v in fit.residuals]},
                      fh, sort_keys=True, indent=2)
            fh.write("\n")
    return 0


_REPORT_SCHEMA = {
    "records": (str, None),
}


def cmd_report(args) -> int:
    from .estimator import read_records_jsonl

    eff = _effective_config(args, _REPORT_SCHEMA)
    if not eff["records"]:
        raise InputError("report needs a records.jsonl path")
    records = read_records_jsonl(eff["records"])
    print(f"{'quantity':>10} {'n':>8} {'mean':>14} {'stderr':>12} {'trials':>7}")
    for r in records:
        print(f"{r.quantity:>10} {r.n:>8} {r.mean:>14.6f} {r.stderr:>12.6f} {r.trials:>7}")
    d_rows = [r for r in records if r.quantity == "D_mean"]
    if d_rows:
        print("psi(n) = mean(D_n)/n:")
        for r in d_rows:
            psi = r.mean / r.n
            print(f"  n={r.n:>8}: psi={psi:.5f}  psi*sqrt(log n)={psi * math.sqrt(math.log(r.n)):.5f}")
    return 0


# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Usage errors surface as InputError (exit 3 with JSON), not exit 2."""

    def error(self, message):
        raise InputError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="walktrace",
        description="Simulation toolkit for the geometry of random-walk traces on Z^4.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "simulate", help="run a distance/resistance/cut-count experiment",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="writes records.jsonl (one estimate per line, schema v=1),\n"
               "summary.csv with columns quantity,n,mean,stderr,trials,seed\n"
               "(quantities: D_mean, R_mean, cut_mean, D_var, gap_mean),\n"
               "and config.txt echoing the effective configuration.")
    p.add_argument("--config", help="key=value config file; flags override")
    p.add_argument("--grid", help="horizons: '1024,2048' or dyadic '1024..16384'")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="existing output directory")
    p.add_argument("--tol", type=float, help="resistance solve tolerance")
    p.add_argument("--resistance", help="true/false: measure effective resistance")
    p.add_argument("--l", help="true/false: measure the interval statistic L")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "intersect", help="estimate f(n;k) and P(F_n) with predictions",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="writes intersect.csv with columns kind,n,k,mean,stderr,trials,\n"
               "prediction; the prediction is log(1+1/(k^2+2k))/(2 log n) for f\n"
               "rows and (pi^2/8)/log n for F rows.")
    p.add_argument("--config")
    p.add_argument("--nk", help="pairs 'n:k,n:k' for f(n;k)")
    p.add_argument("--fn", help="horizons for the three-walk event F_n")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser(
        "green", help="Green table conservation and aggregate table",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="writes green.csv with columns lambda,radius,sum_G,target,\n"
               "deviation,truncation_bound,aggregate_E,minus_log_one_minus_lambda.")
    p.add_argument("--config")
    p.add_argument("--lambda", dest="lambda", help="killing parameters '0.5,0.9'")
    p.add_argument("--radius", help="box radii matching the lambda list (default auto)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_green)

    p = sub.add_parser(
        "fit", help="doubling check and constant extrapolation from records",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="with --out, writes fit_doubling.csv (columns n,ratio,predicted,\n"
               "stderr,z) and fit_extrapolation.json; requires a complete dyadic\n"
               "grid of D_mean records.")
    p.add_argument("records", nargs="?", help="path to records.jsonl")
    p.add_argument("--config")
    p.add_argument("--out", help="optional directory for report files")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", help="print a summary table from records")
    p.add_argument("records", nargs="?", help="path to records.jsonl")
    p.add_argument("--config")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (FileNotFoundError, PermissionError, IsADirectoryError, OSError) as exc:
        return _fail("io", str(exc), _EXIT_IO)
    except (InputError, ParameterError, ValueError) as exc:
        return _fail("input", str(exc), _EXIT_INPUT)
    except CapacityError as exc:
        return _fail("capacity", str(exc), _EXIT_INPUT)
    except NumericalError as exc:
        return _fail("numerical", str(exc), _EXIT_NUMERICAL)


if __name__ == "__main__":
    sys.exit(main())
