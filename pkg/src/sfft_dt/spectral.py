"""DFT conventions, downsampling, and the shared signal/spectrum model.

Conventions used throughout the package:

* analysis:   xhat[k] = (1/n) * sum_n x[n] exp(-2i*pi*k*n/n)
* synthesis:  x[n]    = sum_k xhat[k] exp(+2i*pi*k*n/n)
* a downsampled view x[d*j + l] of length m = n/d is transformed with the
  length-m sum DFT scaled by d/n (equivalently: divided by m).  Under this
  scaling the bin value at k equals

      sum_t xhat[k + t*m] * exp(+2i*pi*(k + t*m)*l/n),   t = 0..d-1,

  i.e. the aliased sum of spectrum entries with the shift phases attached
  and no residual 1/d factor, which is the form the per-bin decoders
  consume directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels


def as_signal(x) -> np.ndarray:
    """Validate and convert to a complex128 signal of power-of-two length."""
    arr = np.ascontiguousarray(x, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError(f"signal must be 1-D, got shape {arr.shape}")
    n = arr.size
    if n < 2 or n & (n - 1):
        raise ValueError(f"signal length must be a power of two >= 2, got {n}")
    return arr


@dataclass
class SparseSpectrum:
    """Sparse frequency-domain representation: index -> complex value."""

    n: int
    entries: dict[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.entries) > self.n:
            raise ValueError("more entries than ambient length")
        for s in self.entries:
            if not 0 <= s < self.n:
                raise ValueError(f"index {s} outside [0, {self.n})")

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.n, dtype=np.complex128)
        for s, v in self.entries.items():
            dense[s] = v
        return dense

    @classmethod
    def from_dense(cls, dense, k: int | None = None,
                   threshold: float = 0.0) -> "SparseSpectrum":
        """Keep the k largest-magnitude entries (all above ``threshold`` if
        k is None)."""
        dense = np.asarray(dense, dtype=np.complex128)
        mag = np.abs(dense)
        if k is None:
            idx = np.nonzero(mag > threshold)[0]
        else:
            idx = np.argpartition(mag, len(dense) - k)[len(dense) - k:] if k else np.array([], dtype=int)
        return cls(len(dense), {int(s): complex(dense[s]) for s in idx})

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class DownsampleView:
    """Time-domain view data[j] = parent[(d*j + shift) mod n]."""

    n: int
    d: int
    shift: int
    data: np.ndarray


@dataclass(frozen=True)
class AliasedSpectrum:
    """Scaled DFT of a downsampled view; values follow the module convention
    (aliased spectrum sums with shift phases, no 1/d factor)."""

    n: int
    d: int
    shift: int
    values: np.ndarray


@dataclass(frozen=True)
class SyndromeSet:
    """Per-bin sequence of shifted-view values m_j and the shifts used."""

    bin: int
    values: np.ndarray
    shifts: np.ndarray

    def __post_init__(self):
        if len(self.values) != len(self.shifts):
            raise ValueError("values and shifts must have equal length")


def forward_dft_oracle(x) -> np.ndarray:
    """O(n^2) direct-summation analysis DFT (1/n normalization).

    Validation oracle: independent of the radix-2 path, evaluated from a
    root-of-unity table in row chunks to bound memory.
    """
    x = as_signal(x)
    n = x.size
    roots = np.exp(-2j * np.pi * np.arange(n) / n)
    out = np.empty(n, dtype=np.complex128)
    chunk = max(1, (1 << 22) // n)
    cols = np.arange(n)
    for start in range(0, n, chunk):
        rows = np.arange(start, min(start + chunk, n))
        out[rows] = roots[np.outer(rows, cols) % n] @ x
    return out / n


def fft(x, normalization: str = "sum") -> np.ndarray:
    """Radix-2 FFT of a power-of-two-length signal.

    ``normalization`` is ``"sum"`` (plain sum DFT) or ``"one_over_n"``
    (matches :func:`forward_dft_oracle`).
    """
    x = as_signal(x)
    out = _kernels.fft_radix2(x, inverse=False)
    if normalization == "sum":
        return out
    if normalization == "one_over_n":
        return out / x.size
    raise ValueError(f"unknown normalization {normalization!r}")


def synthesize(spectrum) -> np.ndarray:
    """Time signal from a spectrum: x[n] = sum_k xhat[k] e^{+2i pi kn/N}."""
    if isinstance(spectrum, SparseSpectrum):
        spectrum = spectrum.to_dense()
    spectrum = as_signal(spectrum)
    return _kernels.fft_radix2(spectrum, inverse=True)


def downsample(x, d: int, shift: int = 0) -> DownsampleView:
    """Time-domain downsample by factor d with shift l (indices mod n)."""
    x = np.ascontiguousarray(x, dtype=np.complex128)
    n = x.size
    if d < 1 or n % d:
        raise ValueError(f"downsampling factor {d} does not divide {n}")
    if not 0 <= shift < n:
        raise ValueError(f"shift {shift} outside [0, {n})")
    idx = (d * np.arange(n // d) + shift) % n
    return DownsampleView(n=n, d=d, shift=shift, data=x[idx])


def transform_view(view: DownsampleView) -> AliasedSpectrum:
    """Scaled DFT of a view (sum DFT of the view divided by its length)."""
    m = view.data.size
    values = _kernels.fft_radix2(view.data, inverse=False) / m
    return AliasedSpectrum(n=view.n, d=view.d, shift=view.shift, values=values)


def aliased_values(x, d: int, shift: int) -> np.ndarray:
    """Scaled DFT of the (d, shift) view of x, as a plain array."""
    return transform_view(downsample(x, d, shift)).values


def syndromes_for_bin(views, k: int) -> SyndromeSet:
    """Collect one bin's syndromes from transformed views sharing a factor d."""
    views = list(views)
    if not views:
        raise ValueError("need at least one transformed view")
    d = views[0].d
    m = views[0].values.size
    if any(v.d != d for v in views):
        raise ValueError("views must share the downsampling factor")
    if not 0 <= k < m:
        raise ValueError(f"bin {k} outside [0, {m})")
    return SyndromeSet(
        bin=k,
        values=np.array([v.values[k] for v in views], dtype=np.complex128),
        shifts=np.array([v.shift for v in views], dtype=np.int64),
    )


def snr(reference, estimate) -> float:
    """SNR in dB of ``estimate`` against the dense ``reference`` spectrum:
    10*log10(mean|est|^2 / mean|ref - est|^2).

    Returns ``math.inf`` (documented sentinel) when the error is exactly 0.
    """
    reference = np.asarray(reference, dtype=np.complex128)
    if isinstance(estimate, SparseSpectrum):
        if estimate.n != reference.size:
            raise ValueError("length mismatch between reference and estimate")
        estimate = estimate.to_dense()
    else:
        estimate = np.asarray(estimate, dtype=np.complex128)
    if estimate.shape != reference.shape:
        raise ValueError("length mismatch between reference and estimate")
    err = np.mean(np.abs(reference - estimate) ** 2)
    sig = np.mean(np.abs(estimate) ** 2)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(sig / err)


def rms(x) -> float:
    """Root mean square magnitude of a time signal."""
    x = np.asarray(x)
    return float(np.sqrt(np.mean(np.abs(x) ** 2)))
