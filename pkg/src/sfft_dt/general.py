"""Recovery of generally sparse spectra (every frequency nonzero, K
significant).

Closed-form decoding is noise-sensitive, so each aliased bin is instead
treated as a small compressive-sensing problem y = Phi b over its d
candidate locations, observed through r randomly shifted views.  Three
stages keep the work proportional to the sparsity: per-bin collision counts
are estimated by a global top-K vote over Hankel singular values, candidate
columns are pruned by evaluating the (perturbed) locator polynomial at all
candidate roots, and the surviving columns are solved by subspace pursuit.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .spectral import SparseSpectrum, aliased_values, as_signal
from .syndrome import SINGULARITY_RTOL

logger = logging.getLogger(__name__)


@dataclass
class GeneralConfig:
    """Parameters for the generally-sparse solver.

    ``d`` defaults to n/(32 k) rounded down to a power of two (clamped to
    [1, n]); the number of random-shift views is ``3 * a_max`` (capped at d,
    since shifts are drawn without replacement from [0, d-1]).
    """

    n: int
    k: int
    a_max: int = 3
    d: int | None = None
    rng_seed: int | tuple = 0
    keep_per_collision: int = 2
    prune: bool = True
    zero_vote_rtol: float = 1e-9

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two >= 2, got {self.n}")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"k must be in [1, n], got {self.k}")
        if not 1 <= self.a_max <= 4:
            raise ValueError(f"a_max must be 1..4, got {self.a_max}")
        if 2 * self.a_max > self.n:
            raise ValueError("n too small for 2*a_max consecutive shifts")
        if self.keep_per_collision < 1:
            raise ValueError("keep_per_collision must be >= 1")
        if self.d is not None and (self.d < 1 or self.n % self.d):
            raise ValueError(f"d={self.d} must divide n={self.n}")

    def resolved_d(self) -> int:
        if self.d is not None:
            return self.d
        raw = self.n // (32 * self.k)
        if raw < 1:
            return 1
        return 1 << (raw.bit_length() - 1)

    @property
    def r(self) -> int:
        return 3 * self.a_max


@dataclass(frozen=True)
class SensingMatrix:
    """Partial-Fourier sensing matrix for one bin: rows are shifted views,
    columns are candidate frequency locations."""

    matrix: np.ndarray
    shifts: np.ndarray
    column_locations: np.ndarray


@dataclass(frozen=True)
class CollisionEstimate:
    a: np.ndarray
    singular_values: np.ndarray


@dataclass
class GeneralTrace:
    d: int = 0
    r: int = 0
    shifts: list[int] = field(default_factory=list)
    fft_samples: int = 0
    collision_histogram: dict[int, int] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    pruned: bool = True
    warnings: list[str] = field(default_factory=list)


def draw_shifts(d: int, r: int, seed) -> np.ndarray:
    """r distinct shifts drawn uniformly from [0, d-1], reproducible."""
    if r > d:
        raise ValueError(f"cannot draw {r} distinct shifts from [0, {d})")
    rng = np.random.default_rng(seed)
    return rng.choice(d, size=r, replace=False).astype(np.int64)


def sensing_matrix(n: int, d: int, k: int, shifts,
                   columns=None) -> SensingMatrix:
    """Phi[j, t] = exp(2i*pi*(k + t*n/d)*shifts[j]/n) over the selected
    candidate columns (all d when ``columns`` is None)."""
    shifts = np.asarray(shifts, dtype=np.int64)
    m = n // d
    if columns is None:
        columns = np.arange(d, dtype=np.int64)
    else:
        columns = np.asarray(columns, dtype=np.int64)
    locs = (k + columns * m) % n
    phi = np.exp(2j * np.pi * np.outer(shifts, locs) / n)
    return SensingMatrix(matrix=phi, shifts=shifts, column_locations=locs)


def mutual_coherence(phi: np.ndarray) -> float:
    """max_{i != j} |<phi_i, phi_j>| / r over normalized columns."""
    gram = np.abs(phi.conj().T @ phi) / phi.shape[0]
    np.fill_diagonal(gram, 0.0)
    return float(gram.max())


def estimate_collisions(syndromes, k: int, a_max: int, d: int,
                        zero_vote_rtol: float = 1e-9) -> CollisionEstimate:
    """Per-bin collision counts via the top-k singular-value vote.

    ``syndromes`` is (bins, >= 2*a_max - 1) at consecutive shifts.  All
    bins' Hankel singular values are pooled; the k largest each add one
    collision to the bin they came from.  Bins whose leading singular value
    sits below ``zero_vote_rtol`` times the RMS syndrome magnitude are
    forced to zero (guards near-exactly-sparse inputs), and counts are
    capped at min(a_max, d).
    """
    syndromes = np.ascontiguousarray(syndromes, dtype=np.complex128)
    nbins = syndromes.shape[0]
    sv = _kernels.hankel_singular_values(syndromes[:, :2 * a_max - 1], a_max)
    flat = sv.ravel()
    bin_of = np.repeat(np.arange(nbins), a_max)
    rank_of = np.tile(np.arange(a_max), nbins)
    take = min(k, flat.size)
    # deterministic vote: by value descending, then bin, then rank
    order = np.lexsort((rank_of, bin_of, -flat))[:take]
    votes = np.bincount(bin_of[order], minlength=nbins)
    rms_syn = float(np.sqrt(np.mean(np.abs(syndromes) ** 2)))
    votes[sv[:, 0] <= zero_vote_rtol * rms_syn] = 0
    votes = np.minimum(votes, min(a_max, d))
    return CollisionEstimate(a=votes.astype(np.int64), singular_values=sv)


def _correlation_keep(y: np.ndarray, shifts: np.ndarray, k: int, n: int,
                      d: int, count: int) -> np.ndarray:
    """Fallback pruning: keep the columns most correlated with y."""
    m = n // d
    locs = (k + np.arange(d) * m) % n
    phi = np.exp(2j * np.pi * np.outer(shifts, locs) / n)
    scores = np.abs(phi.conj().T @ y)
    return np.sort(np.argsort(-scores, kind="stable")[:count])


def _fit_locator(m: np.ndarray, a_max: int):
    """Locator coefficients from the highest-order non-singular Hankel fit.

    The full a_max-order fit lets surplus roots absorb the aliased noise
    floor; on (near-)exactly sparse bins it is singular and the descent
    stops at the true collision count.  Returns (c, order) or (None, 0).
    """
    tiny = np.finfo(float).tiny
    for order in range(a_max, 0, -1):
        c, cd = _kernels.hankel_solve(m[None, : 2 * order], order)
        scale = max(float(np.max(np.abs(m[: 2 * order]))), tiny)
        if abs(cd[0]) > SINGULARITY_RTOL * scale ** order:
            return c, order
    return None, 0


def prune_columns(m, a: int, k: int, n: int, d: int,
                  a_max: int | None = None,
                  keep_per_collision: int = 2,
                  fallback: tuple[np.ndarray, np.ndarray] | None = None,
                  augment_with_correlation: bool = False) -> np.ndarray:
    """Candidate columns surviving the locator-polynomial test for one bin.

    Fits the locator polynomial from syndromes ``m`` at consecutive shifts
    (order a_max, descending past singular fits), evaluates |P(z)| at the
    bin's d candidate roots, and returns the ``keep_per_collision * a``
    column indices with the smallest values.  When every fit order is
    singular, falls back to correlation-based keeping if ``fallback=(y,
    shifts)`` is given, else keeps all columns.

    With ``augment_with_correlation`` (requires ``fallback``), the top-a
    correlation columns are unioned in: at wide d the fitted root can drift
    past half a candidate spacing, and the matched-filter candidates keep
    pruning from discarding a strong tone (at most ``a`` extra columns).
    """
    m = np.ascontiguousarray(m, dtype=np.complex128)
    if a < 1:
        raise ValueError("a must be >= 1")
    if a_max is None:
        a_max = max(a, min(len(m) // 2, 4))
    count = min(keep_per_collision * a, d)
    c, order = _fit_locator(m, a_max)
    if order == 0:
        if fallback is None:
            return np.arange(d, dtype=np.int64)
        y, shifts = fallback
        return _correlation_keep(y, shifts, k, n, d, count)
    errs = _kernels.prune_eval(c, np.array([k], dtype=np.int64), n, d)[0]
    kept = np.sort(np.argpartition(errs, count - 1)[:count])
    if augment_with_correlation and fallback is not None and count < d:
        y, shifts = fallback
        kept = np.union1d(kept,
                          _correlation_keep(y, shifts, k, n, d, min(a, d)))
    return kept


def subspace_pursuit(y: np.ndarray, phi: np.ndarray, a: int,
                     max_iter: int = 10) -> np.ndarray:
    """Greedy a-sparse solve of y ~ phi @ coef.

    Starts from the a columns best correlated with y, then alternates
    support merging, least squares, and re-selection until the residual
    stops shrinking (or ``max_iter``).  Returns the dense coefficient
    vector over phi's columns.
    """
    y = np.asarray(y, dtype=np.complex128)
    phi = np.asarray(phi, dtype=np.complex128)
    rows, cols = phi.shape
    if a < 1 or a > rows:
        raise ValueError(f"sparsity {a} outside [1, rows={rows}]")
    a_eff = min(a, cols)

    def least_squares(support):
        sol, _, rank, _ = np.linalg.lstsq(phi[:, support], y, rcond=None)
        if rank < len(support):
            logger.warning("rank-deficient least squares on support %s",
                           list(support))
        return sol

    support = np.sort(np.argsort(-np.abs(phi.conj().T @ y),
                                 kind="stable")[:a_eff])
    coef = least_squares(support)
    residual = y - phi[:, support] @ coef
    best = (float(np.linalg.norm(residual)), support, coef)

    for _ in range(max_iter):
        corr = np.abs(phi.conj().T @ residual)
        merged = np.union1d(support,
                            np.argsort(-corr, kind="stable")[:a_eff])
        merged_coef = least_squares(merged)
        support = np.sort(
            merged[np.argsort(-np.abs(merged_coef), kind="stable")[:a_eff]])
        coef = least_squares(support)
        residual = y - phi[:, support] @ coef
        norm = float(np.linalg.norm(residual))
        if norm >= best[0] * (1.0 - 1e-12):
            break
        best = (norm, support, coef)

    out = np.zeros(cols, dtype=np.complex128)
    out[best[1]] = best[2]
    return out


def solve_general(x, cfg: GeneralConfig):
    """Full pipeline: shifted-view FFTs, collision vote, pruning, and
    per-bin subspace pursuit; returns (spectrum, trace)."""
    t0 = time.perf_counter()
    x = as_signal(x)
    n = x.size
    if n != cfg.n:
        raise ValueError(f"signal length {n} != configured n {cfg.n}")
    d = cfg.resolved_d()
    m = n // d
    a_max = cfg.a_max
    r_eff = min(cfg.r, d)
    trace = GeneralTrace(d=d, r=r_eff, pruned=cfg.prune)

    # part 1: consecutive-shift views feed collision counting and pruning,
    # random-shift views feed the CS solve
    consecutive = np.stack(
        [aliased_values(x, d, j) for j in range(2 * a_max)])
    shifts = draw_shifts(d, r_eff, cfg.rng_seed)
    trace.shifts = shifts.tolist()
    random_views = np.stack(
        [aliased_values(x, d, int(s)) for s in shifts])
    trace.fft_samples = (2 * a_max + r_eff) * m
    trace.timings["fft"] = time.perf_counter() - t0

    # part 2: collision counts
    t1 = time.perf_counter()
    est = estimate_collisions(consecutive.T, cfg.k, a_max, d,
                              cfg.zero_vote_rtol)
    votes = est.a
    trace.timings["vote"] = time.perf_counter() - t1
    hist: dict[int, int] = {}
    for a in range(0, a_max + 1):
        hist[a] = int(np.count_nonzero(votes == a))
    trace.collision_histogram = hist

    # parts 3 and 4, grouped by estimated collision count
    base_phi = np.exp(2j * np.pi * np.outer(shifts, np.arange(d)) / d)
    entries: dict[int, complex] = {}
    t_prune = 0.0
    t_sp = 0.0
    for a in range(1, a_max + 1):
        bins = np.nonzero(votes == a)[0]
        if bins.size == 0:
            continue
        count = min(cfg.keep_per_collision * a, d)
        t2 = time.perf_counter()
        if cfg.prune and count < d:
            syn = consecutive.T[bins]
            ptilde_kept = np.empty((bins.size, count), dtype=np.int64)
            unfit = np.arange(bins.size)
            tiny = np.finfo(float).tiny
            for order in range(a_max, 0, -1):
                if unfit.size == 0:
                    break
                sub = syn[unfit, : 2 * order]
                c, cd = _kernels.hankel_solve(sub, order)
                scale = np.maximum(np.max(np.abs(sub), axis=1), tiny)
                good = np.abs(cd) > SINGULARITY_RTOL * scale ** order
                rows = unfit[good]
                if rows.size:
                    errs = _kernels.prune_eval(c[good], bins[rows], n, d)
                    ptilde_kept[rows] = np.sort(
                        np.argpartition(errs, count - 1, axis=1)[:, :count],
                        axis=1)
                unfit = unfit[~good]
            for i in unfit.tolist():
                ptilde_kept[i] = _correlation_keep(
                    random_views[:, bins[i]], shifts, int(bins[i]), n, d,
                    count)
            # matched-filter augmentation: at wide d the fitted root can
            # drift past half a candidate spacing, so keep the top-a
            # correlation columns as well (at most a extra per bin)
            w = (np.exp(-2j * np.pi * np.outer(shifts, bins) / n)
                 * random_views[:, bins])
            scores = np.abs(base_phi.conj().T @ w)
            n_top = min(a, d)
            top = np.argpartition(-scores, n_top - 1, axis=0)[:n_top]
            kept = [np.union1d(ptilde_kept[i], top[:, i])
                    for i in range(bins.size)]
        else:
            full = np.arange(d, dtype=np.int64)
            kept = [full] * bins.size
        t_prune += time.perf_counter() - t2

        t3 = time.perf_counter()
        for i, k_bin in enumerate(bins.tolist()):
            cols = kept[i]
            phase = np.exp(2j * np.pi * k_bin * shifts / n)
            phi = phase[:, None] * base_phi[:, cols]
            y = random_views[:, k_bin]
            coef = subspace_pursuit(y, phi, min(a, r_eff))
            nz = np.nonzero(coef)[0]
            for j in nz.tolist():
                entries[int((k_bin + cols[j] * m) % n)] = complex(coef[j])
        t_sp += time.perf_counter() - t3

    trace.timings["prune"] = t_prune
    trace.timings["subspace_pursuit"] = t_sp
    trace.timings["total"] = time.perf_counter() - t0
    return SparseSpectrum(n, entries), trace
