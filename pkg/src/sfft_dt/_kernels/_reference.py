"""Pure-numpy implementations of the numeric kernels.

This module is the fallback used when the compiled extension
(``sfft_dt._kernels._core``) is unavailable or disabled.  Both backends
expose the same functions with identical semantics; the test suite checks
them against each other.

Batched layouts: syndromes, coefficients and roots are stacked along the
first axis so one call can process every active bin of a pass at once.
"""

from __future__ import annotations

import functools

import numpy as np

COMPILED = False

_W1 = -0.5 + 0.5j * np.sqrt(3.0)  # primitive cube root of unity
_W2 = -0.5 - 0.5j * np.sqrt(3.0)


# ---------------------------------------------------------------------------
# radix-2 FFT
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=64)
def _bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((np.arange(n) >> b) & 1) << (bits - 1 - b)
    return rev


@functools.lru_cache(maxsize=128)
def _stage_twiddles(n: int, sign: int):
    tables = []
    m = 2
    while m <= n:
        tables.append(np.exp(sign * 2j * np.pi * np.arange(m // 2) / m))
        m *= 2
    return tables


def fft_radix2(x: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Unnormalized radix-2 DFT (sum convention); ``inverse`` flips the sign
    of the exponent and applies no 1/n factor."""
    x = np.ascontiguousarray(x, dtype=np.complex128)
    n = x.size
    if n == 0 or n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    if n == 1:
        return x.copy()
    sign = 1 if inverse else -1
    out = x[_bit_reverse_indices(n)]
    for tw in _stage_twiddles(n, sign):
        m = 2 * tw.size
        view = out.reshape(n // m, m)
        upper = view[:, : m // 2].copy()
        lower = view[:, m // 2:] * tw
        view[:, : m // 2] = upper + lower
        view[:, m // 2:] = upper - lower
    return out


# ---------------------------------------------------------------------------
# Hankel coefficient solve (Cramer)
# ---------------------------------------------------------------------------

def hankel_solve(m: np.ndarray, a: int):
    """Solve the order-``a`` Hankel system linking syndromes to the monic
    locator-polynomial coefficients.

    Parameters
    ----------
    m : (B, >=2a) complex array of syndromes at consecutive shifts.
    a : collision count, 1..4.

    Returns
    -------
    c : (B, a) coefficients (c_0 .. c_{a-1}); zero-filled where ``cd == 0``.
    cd : (B,) Hankel determinants (the caller applies its singularity
        tolerance to these).
    """
    m = np.asarray(m, dtype=np.complex128)
    if not 1 <= a <= 4:
        raise ValueError(f"collision count must be 1..4, got {a}")
    if m.shape[1] < 2 * a:
        raise ValueError(f"need at least {2 * a} syndromes, got {m.shape[1]}")
    idx = np.add.outer(np.arange(a), np.arange(a))
    hank = m[:, idx]
    rhs = -m[:, a:2 * a]
    cd = np.linalg.det(hank)
    num = np.empty((m.shape[0], a), dtype=np.complex128)
    for j in range(a):
        col = hank.copy()
        col[:, :, j] = rhs
        num[:, j] = np.linalg.det(col)
    safe = np.where(cd == 0, 1.0, cd)
    c = num / safe[:, None]
    c[cd == 0] = 0.0
    return c, cd


# ---------------------------------------------------------------------------
# closed-form roots of monic polynomials, degree 1..4
# ---------------------------------------------------------------------------

def _roots_deg1(c):
    return -c


def _roots_deg2(c):
    c0, c1 = c[:, 0], c[:, 1]
    disc = np.sqrt(c1 * c1 - 4.0 * c0)
    # pick the branch that avoids cancellation in c1 + disc
    disc = np.where(np.real(np.conj(c1) * disc) < 0.0, -disc, disc)
    q = -0.5 * (c1 + disc)
    z0 = q
    safe = np.where(q == 0, 1.0, q)
    z1 = np.where(q == 0, -0.5 * (c1 - disc), c0 / safe)
    return np.stack([z0, z1], axis=1)


def _cube_root_pair(g, h):
    """Larger-magnitude branch of (g +/- sqrt(g^2 + h^3))^(1/3) and its
    cofactor -h/A; handles the fully degenerate g = h = 0 case."""
    r = np.sqrt(g * g + h ** 3)
    lo, hi = g - r, g + r
    a3 = np.where(np.abs(lo) >= np.abs(hi), lo, hi)
    a = a3 ** (1.0 / 3.0)
    safe = np.where(a == 0, 1.0, a)
    b = np.where(a == 0, 0.0, -h / safe)
    return a, b


def _roots_deg3(c):
    c0, c1, c2 = c[:, 0], c[:, 1], c[:, 2]
    g = c0 / 2.0 - c1 * c2 / 6.0 + c2 ** 3 / 27.0
    h = c1 / 3.0 - c2 ** 2 / 9.0
    a, b = _cube_root_pair(g, h)
    shift = -c2 / 3.0
    return np.stack(
        [shift - a - b, shift - _W1 * a - _W2 * b, shift - _W2 * a - _W1 * b],
        axis=1,
    )


def _quadratic_pair(b, c):
    disc = np.sqrt(b * b - 4.0 * c)
    disc = np.where(np.real(np.conj(b) * disc) < 0.0, -disc, disc)
    q = -0.5 * (b + disc)
    safe = np.where(q == 0, 1.0, q)
    other = np.where(q == 0, -0.5 * (b - disc), c / safe)
    return q, other

def _roots_deg4(c):
    c0, c1, c2, c3 = c[:, 0], c[:, 1], c[:, 2], c[:, 3]
    g = (72.0 * c0 * c2 + 9.0 * c1 * c2 * c3 - 27.0 * c1 ** 2
         - 27.0 * c0 * c3 ** 2 - 2.0 * c2 ** 3) / 432.0
    h = (3.0 * c1 * c3 - 12.0 * c0 - c2 ** 2) / 36.0
    cc, dd = _cube_root_pair(g, h)
    y = c2 / 6.0 - cc - dd
    aa = np.sqrt(c3 * c3 / 4.0 - c2 + 2.0 * y)
    # a true zero of aa only shows as ~sqrt(eps) after the square root, so
    # the branch cut sits well above that floor; past it, recover whichever
    # of A, B is well conditioned from the identity 2AB = c3 Y - c1 (both
    # tiny means the quartic is a squared quadratic and A = B = 0)
    num = c3 * y - c1
    scale_a = 1.0 + np.abs(c3) ** 2 / 4.0 + np.abs(c2) + 2.0 * np.abs(y)
    scale_b = 1.0 + np.abs(y) ** 2 + np.abs(c0)
    ratio_ok = np.abs(aa) > 1e-6 * np.sqrt(scale_a)
    b_sqrt = np.sqrt(y * y - c0)
    b_ok = np.abs(b_sqrt) > 1e-6 * np.sqrt(scale_b)
    bb = np.where(ratio_ok, num / (2.0 * np.where(ratio_ok, aa, 1.0)),
                  np.where(b_ok, b_sqrt, 0.0))
    aa = np.where(ratio_ok, aa,
                  np.where(b_ok, num / (2.0 * np.where(b_ok, b_sqrt, 1.0)),
                           0.0))
    z0, z1 = _quadratic_pair(c3 / 2.0 + aa, y + bb)
    z2, z3 = _quadratic_pair(c3 / 2.0 - aa, y - bb)
    return np.stack([z0, z1, z2, z3], axis=1)


def poly_roots(c: np.ndarray) -> np.ndarray:
    """Roots of the monic polynomials z^a + c_{a-1} z^{a-1} + ... + c_0.

    ``c`` is (B, a) with a in 1..4; returns (B, a) roots via the analytic
    quadratic/Cardano/Ferrari forms (no iterative refinement).
    """
    c = np.asarray(c, dtype=np.complex128)
    a = c.shape[1]
    if a == 1:
        return _roots_deg1(c)
    if a == 2:
        return _roots_deg2(c)
    if a == 3:
        return _roots_deg3(c)
    if a == 4:
        return _roots_deg4(c)
    raise ValueError(f"degree must be 1..4, got {a}")


# ---------------------------------------------------------------------------
# Vandermonde value solve (Cramer)
# ---------------------------------------------------------------------------

def vandermonde_solve(z: np.ndarray, m: np.ndarray):
    """Solve V p = m[:, :a] where V[i, j] = z_j^i.

    Returns (p, pd) with pd the Vandermonde determinant
    prod_{i<j} (z_j - z_i); rows with pd == 0 are zero-filled and must be
    rejected by the caller's conditioning tolerance.
    """
    z = np.asarray(z, dtype=np.complex128)
    m = np.asarray(m, dtype=np.complex128)
    b, a = z.shape
    pd = np.ones(b, dtype=np.complex128)
    for i in range(a):
        for j in range(i + 1, a):
            pd *= z[:, j] - z[:, i]
    vand = z[:, None, :] ** np.arange(a)[None, :, None]
    rhs = m[:, :a]
    num = np.empty((b, a), dtype=np.complex128)
    for j in range(a):
        col = vand.copy()
        col[:, :, j] = rhs
        num[:, j] = np.linalg.det(col)
    safe = np.where(pd == 0, 1.0, pd)
    p = num / safe[:, None]
    p[pd == 0] = 0.0
    return p, pd


# ---------------------------------------------------------------------------
# pruning: |P(z)| over every candidate root of a bin
# ---------------------------------------------------------------------------

def prune_eval(c: np.ndarray, k: np.ndarray, n: int, d: int) -> np.ndarray:
    """Evaluate |z^a + c_{a-1} z^{a-1} + ... + c_0| at the d candidate roots
    exp(2i*pi*(k + t*n/d)/n), t = 0..d-1, for each bin k. Returns (B, d)."""
    c = np.asarray(c, dtype=np.complex128)
    k = np.asarray(k)
    base = np.exp(2j * np.pi * (k.astype(np.float64) / n))[:, None]
    z = base * np.exp(2j * np.pi * np.arange(d) / d)[None, :]
    acc = np.ones_like(z)
    for j in range(c.shape[1] - 1, -1, -1):
        acc = acc * z + c[:, j, None]
    return np.abs(acc)


# ---------------------------------------------------------------------------
# singular values of the collision-counting Hankel matrices
# ---------------------------------------------------------------------------

def hankel_singular_values(m: np.ndarray, a_max: int) -> np.ndarray:
    """Descending singular values of the a_max x a_max Hankel matrices built
    from syndromes m_0 .. m_{2*a_max-2} (one row of ``m`` per bin)."""
    m = np.asarray(m, dtype=np.complex128)
    if m.shape[1] < 2 * a_max - 1:
        raise ValueError(f"need {2 * a_max - 1} syndromes, got {m.shape[1]}")
    idx = np.add.outer(np.arange(a_max), np.arange(a_max))
    return np.linalg.svd(m[:, idx], compute_uv=False)
