"""Per-bin aliasing decoder: coefficient solve, closed-form roots, value
solve, and location snapping.

One aliased bin with ``a`` colliding frequencies satisfies

    m_l = sum_j p_j z_j^l,    l = 0 .. 2a-1,

where p_j are the spectrum values and z_j = exp(2i*pi*s_j/n) encode the
locations.  Decoding proceeds in three steps: solve the Hankel system for
the monic locator polynomial P(z), extract its roots in closed form
(degree <= 4), then solve the Vandermonde system for the values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .spectral import SyndromeSet

SINGULARITY_RTOL = 1e-10
ROOT_RESIDUAL_RTOL = 1e-8


class NearSingular(ValueError):
    """Hankel determinant below tolerance: fewer collisions than assumed."""


class IllConditioned(ValueError):
    """Vandermonde determinant below tolerance: roots nearly coincide."""


class DegenerateBranch(ArithmeticError):
    """Closed-form root extraction failed its residual bound on every
    available branch."""


@dataclass(frozen=True)
class PolyCoefficients:
    """Monic locator polynomial P(z) = z^a + c[a-1] z^{a-1} + ... + c[0]."""

    a: int
    c: np.ndarray

    def __post_init__(self):
        if len(self.c) != self.a:
            raise ValueError("coefficient count must equal the degree")


@dataclass(frozen=True)
class DecodedBin:
    """Decoder output for one bin, plus its validation diagnostics."""

    roots: np.ndarray
    values: np.ndarray
    locations: np.ndarray
    membership: bool
    snap_error: float


def _as_syndromes(m) -> np.ndarray:
    if isinstance(m, SyndromeSet):
        m = m.values
    return np.ascontiguousarray(m, dtype=np.complex128)


def solve_coefficients(m, a: int) -> PolyCoefficients:
    """Solve the Hankel system for the locator coefficients.

    Requires syndromes at consecutive shifts 0..2a-1.  Raises
    :class:`NearSingular` when the Hankel determinant is below
    ``SINGULARITY_RTOL * max|m|^a``, which signals that the true collision
    count is smaller than ``a``.
    """
    m = _as_syndromes(m)
    c, cd = _kernels.hankel_solve(m[None, :], a)
    scale = float(np.max(np.abs(m[:2 * a]), initial=0.0))
    if abs(cd[0]) <= SINGULARITY_RTOL * max(scale, np.finfo(float).tiny) ** a:
        raise NearSingular(
            f"Hankel determinant {abs(cd[0]):.3e} below tolerance for a={a}")
    return PolyCoefficients(a=a, c=c[0])


def roots_closed_form(coeffs: PolyCoefficients) -> np.ndarray:
    """Roots of the locator polynomial via the analytic degree<=4 formulas.

    Every returned root satisfies |P(z)| <= 1e-8 * max(1, max|c|); a
    violation raises :class:`DegenerateBranch`.
    """
    z = _kernels.poly_roots(coeffs.c[None, :])[0]
    resid = poly_residuals(coeffs.c[None, :], z[None, :])[0]
    bound = ROOT_RESIDUAL_RTOL * max(1.0, float(np.max(np.abs(coeffs.c))))
    if np.any(resid > bound):
        raise DegenerateBranch(
            f"root residual {resid.max():.3e} exceeds bound {bound:.3e}")
    return z


def poly_residuals(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    """|P(z)| for batched monic coefficients c (B, a) and roots z (B, a)."""
    acc = np.ones_like(z)
    for j in range(c.shape[1] - 1, -1, -1):
        acc = acc * z + c[:, j, None]
    return np.abs(acc)


def solve_values(m, roots) -> np.ndarray:
    """Solve the first ``a`` syndrome equations for the bin values.

    Raises :class:`IllConditioned` when the Vandermonde determinant falls
    below ``SINGULARITY_RTOL * max(1, max|z|)^a`` (roots too close).
    """
    m = _as_syndromes(m)
    roots = np.ascontiguousarray(roots, dtype=np.complex128)
    a = roots.size
    p, pd = _kernels.vandermonde_solve(roots[None, :], m[None, :a])
    scale = max(1.0, float(np.max(np.abs(roots))))
    if abs(pd[0]) <= SINGULARITY_RTOL * scale ** a:
        raise IllConditioned(
            f"Vandermonde determinant {abs(pd[0]):.3e} below tolerance")
    return p[0]


def root_to_location(z: complex, n: int) -> tuple[int, float]:
    """Frequency index from a unit-circle root: s = round(arg(z) n / 2pi)
    mod n, plus the snap error |fractional part| for validation."""
    if z == 0:
        raise ValueError("zero root has no location")
    pos = np.angle(z) * n / (2.0 * np.pi)
    snapped = np.rint(pos)
    return int(snapped) % n, float(abs(pos - snapped))


def reconstruct_syndromes(roots: np.ndarray, values: np.ndarray,
                          count: int) -> np.ndarray:
    """m_l = sum_j p_j z_j^l for l = 0..count-1, batched (B, a) inputs."""
    power = np.ones_like(roots)
    out = np.empty((roots.shape[0], count), dtype=np.complex128)
    for l in range(count):
        out[:, l] = np.sum(values * power, axis=1)
        power = power * roots
    return out


def decode_bin(m, a: int, n: int, d: int, k: int) -> DecodedBin:
    """Full decode of one bin under the ``a``-collision model.

    Composes solve_coefficients -> roots_closed_form -> solve_values ->
    root_to_location.  The membership flag reports whether every recovered
    location is congruent to k modulo n/d (the aliasing-consistency check);
    it is reported, not raised, so callers can fall back to other models.
    """
    m = _as_syndromes(m)
    if len(m) < 2 * a:
        raise ValueError(f"need 2a={2 * a} syndromes, got {len(m)}")
    if a == 1:
        scale = max(float(np.max(np.abs(m[:2]))), np.finfo(float).tiny)
        if abs(m[0]) <= SINGULARITY_RTOL * scale:
            raise NearSingular("m_0 below tolerance for a=1")
        roots = np.array([m[1] / m[0]], dtype=np.complex128)
        values = np.array([m[0]], dtype=np.complex128)
    else:
        coeffs = solve_coefficients(m, a)
        roots = roots_closed_form(coeffs)
        values = solve_values(m, roots)
    locations = np.empty(a, dtype=np.int64)
    snap = 0.0
    for j, z in enumerate(roots):
        locations[j], err = root_to_location(z, n)
        snap = max(snap, err)
    membership = bool(np.all(locations % (n // d) == k))
    return DecodedBin(roots=roots, values=values, locations=locations,
                      membership=membership, snap_error=snap)
