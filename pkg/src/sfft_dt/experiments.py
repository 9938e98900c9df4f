"""Experiment drivers: collision censuses and recovery grids.

Every driver records one row per (cell, trial) with the seed used, so any
cell can be replayed exactly.  Reports are emitted as CSV (rows) and JSON
(summary).  Trials are independent and run under a thread pool whose width
is the ``threads`` argument.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exact import ExactConfig, solve_iterative, solve_noniterative
from .general import GeneralConfig, solve_general
from .signals import ExactSparseSpec, gen_exact, gen_mixture, mixture_for_snr
from .spectral import snr


def default_threads() -> int:
    env = os.environ.get("SFFT_DT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class ExperimentReport:
    name: str
    meta: dict = field(default_factory=dict)
    rows: list[dict] = field(default_factory=list)

    def write_csv(self, path) -> None:
        if not self.rows:
            raise ValueError("no rows to write")
        fields = list(self.rows[0].keys())
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            writer.writerows(self.rows)

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump({"name": self.name, "meta": self.meta,
                       "rows": self.rows}, fh, indent=1)


# ---------------------------------------------------------------------------
# probability bounds used as acceptance thresholds
# ---------------------------------------------------------------------------

def lemma_collision_bound(n: int, d: int, k: int, a_max: int) -> float:
    """Upper bound on P(some bin collides more than a_max times) for k
    uniformly placed frequencies: (n/d) * (d e k / (n (a_max+1)))^(a_max+1)."""
    return (n / d) * (d * math.e * k / (n * (a_max + 1))) ** (a_max + 1)


def partial_recovery_floor(n: int, d: int, k: int, a_max: int,
                           tau: float, mu: int):
    """(min recovered frequency count, probability floor) for the
    tau-parameterized partial-recovery guarantee."""
    frac_bad = tau / mu - 1.0 / (mu * k)
    min_recovered = (1.0 - frac_bad) * n
    inner = ((d * k / n) ** a_max * math.e ** (a_max + 2)
             / (tau * (a_max + 1) ** (a_max + 1)))
    prob = 1.0 - inner ** (tau * k)
    return min_recovered, prob


# ---------------------------------------------------------------------------
# collision census
# ---------------------------------------------------------------------------

def run_collision_census(n: int, k: int, n_plus_values, trials: int = 1000,
                         seed: int = 0, a_cap: int = 4) -> dict:
    """Empirical per-bin collision histograms for each oversampling ratio
    n_plus = n/(d k); also records the per-signal rate of any bin exceeding
    ``a_cap`` collisions and the corresponding analytic bound."""
    results = {}
    for idx, n_plus in enumerate(n_plus_values):
        dk = n // n_plus
        if dk * n_plus != n or dk % k:
            raise ValueError(f"n_plus={n_plus} incompatible with n={n}, k={k}")
        d = dk // k
        m = n // d
        hist = np.zeros(min(k, d) + 1, dtype=np.int64)
        signals_over = 0
        for t in range(trials):
            rng = np.random.default_rng((seed, idx, t))
            support = rng.choice(n, size=k, replace=False)
            counts = np.bincount(support % m, minlength=m)
            hist[: counts.max() + 1] += np.bincount(counts)
            if counts.max() > a_cap:
                signals_over += 1
        prob = hist / (trials * m)
        results[n_plus] = {
            "d": d,
            "per_bin_probability": prob,
            "p_bin_over": float(prob[a_cap + 1:].sum()),
            "p_signal_over": signals_over / trials,
            "bound_signal_over": lemma_collision_bound(n, d, k, a_cap),
            "trials": trials,
        }
    return results


# ---------------------------------------------------------------------------
# exactly sparse grid
# ---------------------------------------------------------------------------

def _exact_trial(n, k, mu, a_max, solver, seed_tuple):
    x, truth = gen_exact(ExactSparseSpec(n=n, k=k, seed=seed_tuple))
    cfg = ExactConfig(n=n, k=k, mu=mu, a_max=a_max)
    t0 = time.perf_counter()
    if solver == "iterative":
        spectrum, trace = solve_iterative(x, cfg)
    else:
        spectrum, trace = solve_noniterative(x, cfg)
    elapsed = time.perf_counter() - t0
    correct = 0
    for s, v in truth.entries.items():
        got = spectrum.entries.get(s)
        if got is not None and abs(got - v) <= 1e-7 * abs(v):
            correct += 1
    spurious = len(set(spectrum.entries) - set(truth.entries))
    perfect = correct == k and spurious == 0
    return {
        "n": n, "k": k, "mu": mu, "a_max": a_max, "solver": solver,
        "seed": str(seed_tuple), "perfect": int(perfect),
        "recovered_fraction": (n - (k - correct) - spurious) / n,
        "full_success": int(trace.full_success),
        "fft_samples": trace.fft_samples,
        "elapsed_s": elapsed,
    }


def run_exact_grid(n: int, k_values, trials: int = 100, mu: int = 4,
                   a_max: int = 4, solver: str = "iterative", seed: int = 0,
                   threads: int | None = None) -> ExperimentReport:
    report = ExperimentReport(
        name="exact_grid",
        meta={"n": n, "k_values": list(k_values), "trials": trials,
              "mu": mu, "a_max": a_max, "solver": solver, "seed": seed})
    jobs = [(k, t) for k in k_values for t in range(trials)]
    workers = threads or default_threads()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = pool.map(
            lambda kt: _exact_trial(n, kt[0], mu, a_max, solver,
                                    (seed, kt[0], kt[1])), jobs)
        report.rows.extend(rows)
    return report


# ---------------------------------------------------------------------------
# generally sparse grid
# ---------------------------------------------------------------------------

def _general_trial(n, n_over_k, snr_db, a_max, with_prune, without_prune,
                   seed_tuple):
    k = n // n_over_k
    spec = mixture_for_snr(n, k, snr_db, seed=seed_tuple)
    x, significant, full = gen_mixture(spec)
    dense_sig = significant.to_dense()
    noise_norm = float(np.linalg.norm(full - dense_sig))
    row = {
        "n": n, "n_over_k": n_over_k, "k": k, "snr_target_db": snr_db,
        "a_max": a_max, "seed": str(seed_tuple),
        "snr_significant_db": snr(full, significant),
        "noise_norm": noise_norm,
    }
    variants = [("prune", True)] if with_prune else []
    if without_prune:
        variants.append(("noprune", False))
    for label, prune_flag in variants:
        # same rng_seed for both variants: paired shift draws
        cfg = GeneralConfig(n=n, k=k, a_max=a_max, prune=prune_flag,
                            rng_seed=seed_tuple)
        t0 = time.perf_counter()
        spectrum, trace = solve_general(x, cfg)
        elapsed = time.perf_counter() - t0
        err = float(np.linalg.norm(full - spectrum.to_dense()))
        row[f"snr_out_db_{label}"] = snr(full, spectrum)
        row[f"error_ratio_{label}"] = (err / noise_norm if noise_norm
                                       else math.inf)
        row[f"elapsed_s_{label}"] = elapsed
        row[f"d_{label}"] = trace.d
    return row


def run_general_grid(n: int, n_over_k_values, snr_db_values,
                     trials: int = 50, a_max: int = 3,
                     compare_pruning: bool = True, seed: int = 0,
                     threads: int | None = None) -> ExperimentReport:
    report = ExperimentReport(
        name="general_grid",
        meta={"n": n, "n_over_k_values": list(n_over_k_values),
              "snr_db_values": list(snr_db_values), "trials": trials,
              "a_max": a_max, "seed": seed,
              "compare_pruning": compare_pruning})
    jobs = [(nk, s, t) for nk in n_over_k_values for s in snr_db_values
            for t in range(trials)]
    workers = threads or default_threads()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = pool.map(
            lambda j: _general_trial(n, j[0], j[1], a_max, True,
                                     compare_pruning, (seed, j[0], j[1], j[2])),
            jobs)
        report.rows.extend(rows)
    return report


def summarize_general(report: ExperimentReport) -> list[dict]:
    """Mean per-cell metrics of a general-grid report."""
    cells: dict[tuple, list[dict]] = {}
    for row in report.rows:
        cells.setdefault((row["n_over_k"], row["snr_target_db"]), []).append(row)
    out = []
    for (n_over_k, snr_db), rows in sorted(cells.items()):
        entry = {"n_over_k": n_over_k, "snr_target_db": snr_db,
                 "trials": len(rows)}
        for key in rows[0]:
            if key.startswith(("snr_", "error_ratio", "elapsed")):
                vals = [r[key] for r in rows if math.isfinite(r[key])]
                entry[f"mean_{key}"] = float(np.mean(vals)) if vals else math.inf
        out.append(entry)
    return out
