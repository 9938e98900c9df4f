"""Solvers for exactly sparse spectra.

Both solvers downsample the input in time, transform the short views, and
decode each aliased bin in closed form.  The non-iterative solver uses one
fixed downsampling factor and tries collision counts 1..a_max per bin; the
iterative solver starts at d = n/(mu*k), solves the 1-collision bins,
subtracts them, doubles d, and continues with 2, 3, 4 collisions, deferring
bins that fail validation to the next pass (set T).  A bottom-up sweep over
d handles unknown sparsity.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .spectral import SparseSpectrum, aliased_values, as_signal, rms
from .syndrome import SINGULARITY_RTOL, poly_residuals, reconstruct_syndromes

logger = logging.getLogger(__name__)

CONSISTENCY_RTOL = 1e-6
SNAP_TOL = 0.25
UNIT_MODULUS_TOL = 1e-6


@dataclass
class ExactConfig:
    """Parameters for the exactly-sparse solvers.

    ``d = n/(mu*k)`` rounded down to a power of two (clamped to [1, n]) unless
    ``initial_d`` overrides it.  ``zero_threshold`` is relative: a syndrome
    magnitude below ``zero_threshold * rms(x) * d`` is treated as zero.
    ``tau`` is the tolerated unrecovered fraction parameter (reporting only).
    """

    n: int
    k: int | None = None
    mu: int = 4
    a_max: int = 4
    zero_threshold: float = 1e-9
    tau: float = 0.01
    initial_d: int | None = None

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two >= 2, got {self.n}")
        if not 1 <= self.a_max <= 4:
            raise ValueError(f"a_max must be in 1..4, got {self.a_max}")
        if self.mu < 1 or self.mu & (self.mu - 1):
            raise ValueError(f"mu must be a power of two >= 1, got {self.mu}")
        if self.k is None and self.initial_d is None:
            raise ValueError("either k or initial_d is required")
        if self.k is not None and self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.initial_d is not None:
            if self.initial_d < 1 or self.n % self.initial_d:
                raise ValueError(
                    f"initial_d {self.initial_d} must divide n={self.n}")

    def resolved_d(self) -> int:
        if self.initial_d is not None:
            return self.initial_d
        raw = self.n // (self.mu * self.k)
        if raw < 1:
            return 1
        return 1 << (raw.bit_length() - 1)


@dataclass
class IterationStats:
    d: int
    bins_attempted: int
    bins_solved: int
    bins_deferred: int
    syndromes_computed: int
    fft_samples: int


@dataclass
class SolverTrace:
    solver: str
    iterations: list[IterationStats] = field(default_factory=list)
    fft_samples: int = 0
    syndromes_computed: int = 0
    full_success: bool = False
    unresolved_bins: list[int] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    elapsed_s: float = 0.0


def _batch_decode(syn: np.ndarray, a: int, n: int, d: int, bins: np.ndarray):
    """Decode every syndrome row (B, S >= 2a) under the a-collision model.

    Returns (accept, locations, values, retryable): ``accept`` rows passed
    membership, snap, distinctness, and reproduction of all S syndromes;
    ``retryable`` rows failed on singularity/conditioning, which signals a
    smaller true collision count.
    """
    nbins, n_syn = syn.shape
    tiny = np.finfo(float).tiny
    m_used = syn[:, : 2 * a]
    scale = np.maximum(np.max(np.abs(m_used), axis=1), tiny)
    if a == 1:
        solvable = np.abs(syn[:, 0]) > SINGULARITY_RTOL * scale
        denom = np.where(solvable, syn[:, 0], 1.0)
        roots = np.where(solvable, syn[:, 1] / denom, 0.0)[:, None]
        values = syn[:, 0:1].copy()
        ok = solvable
    else:
        c, cd = _kernels.hankel_solve(m_used, a)
        ok = np.abs(cd) > SINGULARITY_RTOL * scale ** a
        roots = _kernels.poly_roots(c)
        resid_bound = 1e-8 * np.maximum(1.0, np.max(np.abs(c), axis=1))
        ok &= np.max(poly_residuals(c, roots), axis=1) <= resid_bound
        values, pd = _kernels.vandermonde_solve(roots, m_used)
        zscale = np.maximum(1.0, np.max(np.abs(roots), axis=1))
        ok &= np.abs(pd) > SINGULARITY_RTOL * zscale ** a

    pos = np.angle(roots) * n / (2.0 * np.pi)
    snapped = np.rint(pos)
    snap_err = np.max(np.abs(pos - snapped), axis=1)
    locations = snapped.astype(np.int64) % n

    # true roots lie on the unit circle; an off-circle root means the
    # collision model is wrong even when its angle happens to land on an
    # in-set grid point (which it provably does for half the 2-collision
    # bins decoded under a=1 with unit-magnitude values)
    on_circle = np.max(np.abs(np.abs(roots) - 1.0), axis=1) <= UNIT_MODULUS_TOL
    membership = np.all(locations % (n // d) == bins[:, None], axis=1)
    if a == 1:
        distinct = np.ones(nbins, dtype=bool)
    else:
        srt = np.sort(locations, axis=1)
        distinct = np.all(np.diff(srt, axis=1) != 0, axis=1)

    recon = reconstruct_syndromes(roots, values, n_syn)
    syn_scale = np.maximum(np.max(np.abs(syn), axis=1), tiny)
    consistent = (np.max(np.abs(recon - syn), axis=1)
                  <= CONSISTENCY_RTOL * syn_scale)

    accept = (ok & membership & distinct & consistent & on_circle
              & (snap_err <= SNAP_TOL))
    retryable = ~ok
    return accept, locations, values, retryable


def _write_solution(solved: dict[int, complex], locs, vals, trace: SolverTrace):
    for s, v in zip(locs.tolist(), vals.tolist()):
        if s in solved:
            msg = f"duplicate location {s}: overwriting earlier value"
            trace.warnings.append(msg)
            logger.warning(msg)
        solved[s] = v


def solve_noniterative(x, cfg: ExactConfig):
    """Fixed-d solver: 2*a_max shifted views, per-bin decode with ascending
    collision count, accepting the first model that validates."""
    t0 = time.perf_counter()
    x = as_signal(x)
    n = x.size
    if n != cfg.n:
        raise ValueError(f"signal length {n} != configured n {cfg.n}")
    d = cfg.resolved_d()
    m = n // d
    a_max = cfg.a_max
    trace = SolverTrace(solver="non_iterative")

    views = np.stack([aliased_values(x, d, j) for j in range(2 * a_max)])
    trace.fft_samples = 2 * a_max * m
    threshold = cfg.zero_threshold * rms(x) * d

    active = np.nonzero(np.any(np.abs(views) > threshold, axis=0))[0]
    solved: dict[int, complex] = {}
    unsolved = active
    stats = IterationStats(d=d, bins_attempted=len(active), bins_solved=0,
                           bins_deferred=0, syndromes_computed=0,
                           fft_samples=trace.fft_samples)
    for a in range(1, a_max + 1):
        if unsolved.size == 0:
            break
        syn = views[:, unsolved].T
        stats.syndromes_computed += syn.size
        accept, locs, vals, _ = _batch_decode(syn, a, n, d, unsolved)
        for i in np.nonzero(accept)[0]:
            _write_solution(solved, locs[i], vals[i], trace)
        unsolved = unsolved[~accept]
    stats.bins_solved = stats.bins_attempted - len(unsolved)
    stats.bins_deferred = len(unsolved)
    trace.iterations.append(stats)
    trace.syndromes_computed = stats.syndromes_computed
    trace.unresolved_bins = unsolved.tolist()
    trace.full_success = not trace.unresolved_bins
    trace.elapsed_s = time.perf_counter() - t0
    return SparseSpectrum(n, solved), trace


def solve_iterative(x, cfg: ExactConfig):
    """Iterative solver: per pass l computes two new shifted views at the
    current d, folds the previous views down to the doubled d, subtracts
    already-solved frequencies, and decodes active bins with a = l+1
    collisions; failed bins are deferred to the next pass."""
    t0 = time.perf_counter()
    x = as_signal(x)
    n = x.size
    if n != cfg.n:
        raise ValueError(f"signal length {n} != configured n {cfg.n}")
    d = cfg.resolved_d()
    a_max = cfg.a_max
    signal_rms = rms(x)

    solved: dict[int, complex] = {}
    deferred: set[int] = set()
    views: list[np.ndarray] = []
    trace = SolverTrace(solver="iterative")
    threshold = cfg.zero_threshold * signal_rms * d

    for l in range(a_max):
        m = n // d
        if views and views[0].size != m:
            # fold each previous view onto the doubled d: the halves of a
            # view alias pairwise into the shorter bin space
            views = [v[:m] + v[m:] for v in views]
            deferred = {b % m for b in deferred}
        threshold = cfg.zero_threshold * signal_rms * d
        for shift in (2 * l, 2 * l + 1):
            v = aliased_values(x, d, shift)
            trace.fft_samples += m
            if solved:
                locs = np.fromiter(solved.keys(), dtype=np.int64,
                                   count=len(solved))
                vals = np.fromiter(solved.values(), dtype=np.complex128,
                                   count=len(solved))
                np.subtract.at(v, locs % m,
                               vals * np.exp(2j * np.pi * locs * shift / n))
            views.append(v)

        new_active = np.nonzero(
            (np.abs(views[2 * l]) > threshold)
            | (np.abs(views[2 * l + 1]) > threshold))[0]
        active = np.union1d(new_active,
                            np.fromiter(deferred, dtype=np.int64,
                                        count=len(deferred)))
        stats = IterationStats(d=d, bins_attempted=len(active), bins_solved=0,
                               bins_deferred=0, syndromes_computed=0,
                               fft_samples=2 * m)

        if active.size:
            syn = np.stack([views[j][active] for j in range(2 * l + 2)],
                           axis=1)
            stats.syndromes_computed = syn.size
            remaining = active
            syn_rem = syn
            a_try = l + 1
            while remaining.size and a_try >= 1:
                accept, locs, vals, retryable = _batch_decode(
                    syn_rem, a_try, n, d, remaining)
                for i in np.nonzero(accept)[0]:
                    k = int(remaining[i])
                    _write_solution(solved, locs[i], vals[i], trace)
                    deferred.discard(k)
                    # remove the decoded contribution from every live view
                    # so later passes see the residual spectrum
                    for j in range(2 * l + 2):
                        views[j][k] -= np.sum(
                            vals[i] * np.exp(2j * np.pi * locs[i] * j / n))
                    stats.bins_solved += 1
                keep = ~accept & retryable if a_try > 1 else np.zeros(
                    remaining.size, dtype=bool)
                for k in remaining[~accept & ~keep].tolist():
                    deferred.add(int(k))
                    stats.bins_deferred += 1
                remaining = remaining[keep]
                syn_rem = syn_rem[keep]
                a_try -= 1

        trace.iterations.append(stats)
        trace.syndromes_computed += stats.syndromes_computed
        if d < n:
            d *= 2

    residual = max((float(np.max(np.abs(v), initial=0.0)) for v in views),
                   default=0.0)
    trace.unresolved_bins = sorted(deferred)
    trace.full_success = not deferred and residual <= threshold
    trace.elapsed_s = time.perf_counter() - t0
    return SparseSpectrum(n, solved), trace


@dataclass
class EstimateResult:
    spectrum: SparseSpectrum
    k_hat: int
    final_d: int
    fft_samples: int
    fft_samples_final_run: int
    dense_fallback: bool
    stages: list[tuple[int, bool]]
    trace: SolverTrace


def estimate_sparsity_and_solve(x, mu: int = 4, a_max: int = 4,
                                zero_threshold: float = 1e-9) -> EstimateResult:
    """Bottom-up sparsity estimation: run the fixed-d solver at d = n, n/2,
    ..., stopping at the first d where every active bin decodes.

    The halving sequence's total syndrome-FFT sample count is below twice
    the count of a single run at the final d (geometric series).  Returns
    the solved spectrum, the estimate k_hat = number of recovered
    frequencies, and instrumentation.  ``dense_fallback`` flags the d = 1
    endpoint being reached without full success.
    """
    x = as_signal(x)
    n = x.size
    d = n
    total = 0
    stages: list[tuple[int, bool]] = []
    while True:
        cfg = ExactConfig(n=n, k=None, mu=mu, a_max=a_max,
                          zero_threshold=zero_threshold, initial_d=d)
        spectrum, trace = solve_noniterative(x, cfg)
        total += trace.fft_samples
        stages.append((d, trace.full_success))
        if trace.full_success or d == 1:
            return EstimateResult(
                spectrum=spectrum,
                k_hat=len(spectrum),
                final_d=d,
                fft_samples=total,
                fft_samples_final_run=trace.fft_samples,
                dense_fallback=not trace.full_success,
                stages=stages,
                trace=trace,
            )
        d //= 2
