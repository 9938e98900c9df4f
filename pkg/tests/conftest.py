"""Shared test helpers.

Reference computations here deliberately use numpy.fft (pocketfft), not the
package's own radix-2 path, so library results are checked against an
independent implementation.
"""

import numpy as np
import pytest


def np_synthesize(dense):
    """Independent synthesis: x[n] = sum_k X[k] e^{+2i pi kn/N}."""
    dense = np.asarray(dense, dtype=np.complex128)
    return np.fft.ifft(dense) * dense.size


def np_analyze(x):
    """Independent analysis with the 1/N convention."""
    x = np.asarray(x, dtype=np.complex128)
    return np.fft.fft(x) / x.size


def sparse_to_dense(entries, n):
    dense = np.zeros(n, dtype=np.complex128)
    for s, v in entries.items():
        dense[s] = v
    return dense


def random_sparse(rng, n, k, unit=False):
    """Random exactly sparse spectrum as a dict."""
    support = rng.choice(n, size=k, replace=False)
    if unit:
        vals = np.exp(2j * np.pi * rng.random(k))
    else:
        vals = rng.normal(size=k) + 1j * rng.normal(size=k)
    return {int(s): complex(v) for s, v in zip(support, vals)}


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)
