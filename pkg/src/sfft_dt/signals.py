"""Test-signal generators.

Exactly sparse signals place K values on a uniform random support;
generally sparse signals draw every frequency from a two-component
circular Gaussian mixture (active with probability p = K/N).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import SparseSpectrum, synthesize


@dataclass(frozen=True)
class ExactSparseSpec:
    """n, k, RNG seed, and the value distribution: ``unit_phase`` (random
    phase, unit magnitude) or ``gaussian`` (circular complex normal)."""

    n: int
    k: int
    seed: int = 0
    values: str = "unit_phase"

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValueError(f"k must be in [0, n], got {self.k}")
        if self.values not in ("unit_phase", "gaussian"):
            raise ValueError(f"unknown value distribution {self.values!r}")


@dataclass(frozen=True)
class MixtureSpec:
    """Two-component Gaussian mixture over all n frequencies; the active
    component (probability k/n) uses sigma_on, the rest sigma_off."""

    n: int
    k: int
    sigma_on: float
    sigma_off: float
    seed: int = 0

    def __post_init__(self):
        if not (self.sigma_on > self.sigma_off >= 0.0):
            raise ValueError("need sigma_on > sigma_off >= 0")
        if not 0 <= self.k <= self.n:
            raise ValueError(f"k must be in [0, n], got {self.k}")

    @property
    def p(self) -> float:
        return self.k / self.n


def _circular_normal(rng, size, sigma):
    scale = sigma / np.sqrt(2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def gen_exact(spec: ExactSparseSpec):
    """Exactly k-sparse spectrum on uniform random support; returns
    (time signal, truth spectrum)."""
    rng = np.random.default_rng(spec.seed)
    support = rng.choice(spec.n, size=spec.k, replace=False)
    if spec.values == "unit_phase":
        vals = np.exp(2j * np.pi * rng.random(spec.k))
    else:
        vals = _circular_normal(rng, spec.k, 1.0)
    truth = SparseSpectrum(
        spec.n, {int(s): complex(v) for s, v in zip(support, vals)})
    return synthesize(truth.to_dense()), truth


def gen_mixture(spec: MixtureSpec):
    """Generally sparse spectrum from the mixture model; returns
    (time signal, top-k significant part, full dense spectrum)."""
    rng = np.random.default_rng(spec.seed)
    on = rng.random(spec.n) < spec.p
    sigma = np.where(on, spec.sigma_on, spec.sigma_off)
    full = sigma * _circular_normal(rng, spec.n, 1.0)
    order = np.argpartition(np.abs(full), spec.n - spec.k)[spec.n - spec.k:]
    significant = SparseSpectrum(
        spec.n, {int(s): complex(full[s]) for s in order})
    return synthesize(full), significant, full


def sigma_off_for_snr(n: int, k: int, snr_db: float,
                      sigma_on: float = 1.0) -> float:
    """sigma_off making the expected significant-vs-rest SNR equal snr_db:
    k*sigma_on^2 / ((n-k)*sigma_off^2) = 10^(snr_db/10)."""
    if not 0 < k < n:
        raise ValueError("need 0 < k < n")
    return sigma_on * np.sqrt(k / ((n - k) * 10.0 ** (snr_db / 10.0)))


def mixture_for_snr(n: int, k: int, snr_db: float, seed: int = 0) -> MixtureSpec:
    """MixtureSpec calibrated so SNR of the significant part is ~snr_db."""
    return MixtureSpec(n=n, k=k, sigma_on=1.0,
                       sigma_off=sigma_off_for_snr(n, k, snr_db), seed=seed)
