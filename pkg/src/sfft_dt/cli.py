"""Command-line front end.

Subcommands: ``transform-exact``, ``transform-general``, ``estimate-k``,
``bench``, ``census``.  Signals are read in the binary SFDT format; sparse
spectra are written as JSON.  Exit codes: 0 success / full recovery,
2 partial recovery, 1 I/O or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import io
from .exact import ExactConfig, estimate_sparsity_and_solve, solve_iterative, \
    solve_noniterative
from .experiments import default_threads, run_collision_census, \
    run_exact_grid, run_general_grid, summarize_general
from .general import GeneralConfig, solve_general
from .spectral import fft, snr

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARTIAL = 2


def _add_common(p):
    p.add_argument("--out", metavar="PATH", help="output path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="worker cap (default: SFFT_DT_THREADS or all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sfft-dt",
        description="Sparse FFT by time-domain downsampling.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform-exact",
                       help="recover an exactly sparse spectrum")
    p.add_argument("input", metavar="SIGNAL")
    p.add_argument("--k", type=int, required=True, help="sparsity")
    p.add_argument("--n", type=int, help="expected length (validated)")
    p.add_argument("--mu", type=int, default=4)
    p.add_argument("--a-max", type=int, default=4)
    p.add_argument("--d", type=int, help="override the downsampling factor")
    p.add_argument("--solver", choices=["iterative", "non-iterative"],
                   default="iterative")
    p.add_argument("--trace-out", metavar="PATH",
                   help="write the solver trace as JSON")
    _add_common(p)

    p = sub.add_parser("transform-general",
                       help="recover the significant part of a dense spectrum")
    p.add_argument("input", metavar="SIGNAL")
    p.add_argument("--k", type=int, required=True, help="significant count")
    p.add_argument("--n", type=int, help="expected length (validated)")
    p.add_argument("--a-max", type=int, default=3)
    p.add_argument("--d", type=int, help="override the downsampling factor")
    p.add_argument("--no-prune", action="store_true",
                   help="skip candidate-column pruning")
    _add_common(p)

    p = sub.add_parser("estimate-k",
                       help="estimate sparsity bottom-up and solve")
    p.add_argument("input", metavar="SIGNAL")
    p.add_argument("--mu", type=int, default=4)
    p.add_argument("--a-max", type=int, default=4)
    _add_common(p)

    p = sub.add_parser("bench", help="run a named experiment grid")
    p.add_argument("--grid", required=True,
                   choices=["exact-small", "exact-desk", "general-desk"])
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_common(p)

    p = sub.add_parser("census", help="empirical collision census")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n-plus", type=int, nargs="+", default=[4],
                   help="oversampling ratios n/(d k)")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_common(p)
    return parser


def _read_signal(path, expect_n):
    x = io.read_signal(path)
    if expect_n is not None and x.size != expect_n:
        raise io.FormatError(
            f"{path}: length {x.size} != requested --n {expect_n}")
    return x


def _cmd_transform_exact(args) -> int:
    x = _read_signal(args.input, args.n)
    cfg = ExactConfig(n=x.size, k=args.k, mu=args.mu, a_max=args.a_max,
                      initial_d=args.d)
    solver = solve_iterative if args.solver == "iterative" else solve_noniterative
    spectrum, trace = solver(x, cfg)
    if args.out:
        io.write_spectrum(args.out, spectrum)
    if args.trace_out:
        with open(args.trace_out, "w") as fh:
            json.dump({
                "solver": trace.solver,
                "full_success": trace.full_success,
                "fft_samples": trace.fft_samples,
                "unresolved_bins": trace.unresolved_bins,
                "iterations": [vars(it) for it in trace.iterations],
                "warnings": trace.warnings,
            }, fh, indent=1)
    print(json.dumps({
        "n": x.size, "recovered": len(spectrum),
        "full_success": trace.full_success,
        "fft_samples": trace.fft_samples,
        "elapsed_s": round(trace.elapsed_s, 6),
    }))
    return EXIT_OK if trace.full_success else EXIT_PARTIAL


def _cmd_transform_general(args) -> int:
    x = _read_signal(args.input, args.n)
    cfg = GeneralConfig(n=x.size, k=args.k, a_max=args.a_max, d=args.d,
                        rng_seed=args.seed, prune=not args.no_prune)
    t0 = time.perf_counter()
    spectrum, trace = solve_general(x, cfg)
    elapsed = time.perf_counter() - t0
    if args.out:
        io.write_spectrum(args.out, spectrum)
    reference = fft(x, "one_over_n")
    print(json.dumps({
        "n": x.size, "k": args.k, "entries": len(spectrum),
        "pruning": not args.no_prune, "d": trace.d,
        "snr_db": round(snr(reference, spectrum), 3),
        "fft_samples": trace.fft_samples,
        "elapsed_s": round(elapsed, 6),
    }))
    return EXIT_OK


def _cmd_estimate_k(args) -> int:
    x = _read_signal(args.input, None)
    result = estimate_sparsity_and_solve(x, mu=args.mu, a_max=args.a_max)
    if args.out:
        io.write_spectrum(args.out, result.spectrum)
    print(json.dumps({
        "n": x.size, "k_hat": result.k_hat, "final_d": result.final_d,
        "fft_samples": result.fft_samples,
        "dense_fallback": result.dense_fallback,
    }))
    return EXIT_PARTIAL if result.dense_fallback else EXIT_OK


def _cmd_bench(args) -> int:
    threads = args.threads or default_threads()
    if args.grid == "exact-small":
        report = run_exact_grid(
            n=2 ** 12, k_values=[2 ** 4, 2 ** 5, 2 ** 6],
            trials=args.trials or 25, seed=args.seed, threads=threads)
    elif args.grid == "exact-desk":
        report = run_exact_grid(
            n=2 ** 16, k_values=[2 ** j for j in range(4, 13)],
            trials=args.trials or 25, seed=args.seed, threads=threads)
    else:
        report = run_general_grid(
            n=2 ** 16, n_over_k_values=[2 ** 6, 2 ** 8],
            snr_db_values=[10, 20, 30], trials=args.trials or 10,
            seed=args.seed, threads=threads)
        print(json.dumps(summarize_general(report)))
    if args.out:
        if args.format == "csv":
            report.write_csv(args.out)
        else:
            report.write_json(args.out)
    return EXIT_OK


def _cmd_census(args) -> int:
    results = run_collision_census(args.n, args.k, args.n_plus,
                                   trials=args.trials, seed=args.seed)
    rows = []
    for n_plus, res in results.items():
        for a, prob in enumerate(res["per_bin_probability"]):
            rows.append({"n_plus": n_plus, "d": res["d"], "a": a,
                         "probability": prob})
    if args.out:
        if args.format == "csv":
            import csv as _csv
            with open(args.out, "w", newline="") as fh:
                writer = _csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
                writer.writeheader()
                writer.writerows(rows)
        else:
            with open(args.out, "w") as fh:
                json.dump(rows, fh, indent=1)
    summary = {str(np_): {"p_signal_over": res["p_signal_over"],
                          "bound_signal_over": res["bound_signal_over"],
                          "p_bin_over": res["p_bin_over"]}
               for np_, res in results.items()}
    print(json.dumps(summary))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "transform-exact": _cmd_transform_exact,
        "transform-general": _cmd_transform_general,
        "estimate-k": _cmd_estimate_k,
        "bench": _cmd_bench,
        "census": _cmd_census,
    }
    try:
        return handlers[args.command](args)
    except (io.FormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
