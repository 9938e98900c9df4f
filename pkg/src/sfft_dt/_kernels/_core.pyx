# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: scalar C loops over bins.

Semantics must match ``_reference.py`` (the pure-numpy fallback); the test
suite cross-checks both backends.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex csqrt(double complex)
    double complex cpow(double complex, double complex)
    double complex conj(double complex)
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)

from libc.math cimport sqrt, fabs, M_PI

COMPILED = True

cdef double complex _W1 = -0.5 + 0.8660254037844386j
cdef double complex _W2 = -0.5 - 0.8660254037844386j


# ---------------------------------------------------------------------------
# radix-2 FFT
# ---------------------------------------------------------------------------

def fft_radix2(x, bint inverse=False):
    """Unnormalized radix-2 DFT (sum convention); ``inverse`` flips the sign
    of the exponent and applies no 1/n factor."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] buf = np.array(
        x, dtype=np.complex128, copy=True, order="C")
    cdef Py_ssize_t n = buf.shape[0]
    if n == 0 or n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    cdef double complex[::1] a = buf
    cdef double sign = 1.0 if inverse else -1.0
    cdef Py_ssize_t i, j, bit, m, half, start, k
    cdef double complex w, wlen, u, t

    # bit-reversal permutation
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            u = a[i]
            a[i] = a[j]
            a[j] = u

    m = 2
    while m <= n:
        half = m >> 1
        wlen = cexp(sign * 2j * M_PI / m)
        for start in range(0, n, m):
            w = 1.0
            for k in range(half):
                # periodic renorm keeps the twiddle recurrence error ~eps
                if (k & 255) == 0 and k > 0:
                    w = cexp(sign * 2j * M_PI * k / m)
                u = a[start + k]
                t = a[start + k + half] * w
                a[start + k] = u + t
                a[start + k + half] = u - t
                w = w * wlen
        m <<= 1
    return buf


# ---------------------------------------------------------------------------
# small determinants
# ---------------------------------------------------------------------------

cdef inline double complex _det2(double complex a00, double complex a01,
                                 double complex a10, double complex a11) nogil:
    return a00 * a11 - a01 * a10


cdef inline double complex _det3(double complex* a) nogil:
    # row-major 3x3
    return (a[0] * _det2(a[4], a[5], a[7], a[8])
            - a[1] * _det2(a[3], a[5], a[6], a[8])
            + a[2] * _det2(a[3], a[4], a[6], a[7]))


cdef inline double complex _det4(double complex* a) nogil:
    cdef double complex minor[9]
    cdef double complex acc = 0.0
    cdef Py_ssize_t col, i, j, jj
    cdef double sign = 1.0
    for col in range(4):
        i = 0
        for j in range(1, 4):
            for jj in range(4):
                if jj != col:
                    minor[i] = a[4 * j + jj]
                    i += 1
        acc += sign * a[col] * _det3(minor)
        sign = -sign
    return acc


cdef double complex _detn(double complex* a, int n) nogil:
    if n == 1:
        return a[0]
    if n == 2:
        return _det2(a[0], a[1], a[2], a[3])
    if n == 3:
        return _det3(a)
    return _det4(a)


# ---------------------------------------------------------------------------
# Hankel coefficient solve (Cramer)
# ---------------------------------------------------------------------------

def hankel_solve(m, int a):
    """Cramer solve of the order-``a`` Hankel system; returns (c, cd)."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] ms = np.ascontiguousarray(
        m, dtype=np.complex128)
    if not 1 <= a <= 4:
        raise ValueError(f"collision count must be 1..4, got {a}")
    if ms.shape[1] < 2 * a:
        raise ValueError(f"need at least {2 * a} syndromes, got {ms.shape[1]}")
    cdef Py_ssize_t nb = ms.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] c = np.zeros((nb, a), dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] cd = np.empty(nb, dtype=np.complex128)
    cdef double complex[:, ::1] mv = ms
    cdef double complex[:, ::1] cv = c
    cdef double complex[::1] cdv = cd
    cdef double complex hank[16]
    cdef double complex work[16]
    cdef double complex det, num
    cdef Py_ssize_t b, i, j, col
    for b in range(nb):
        for i in range(a):
            for j in range(a):
                hank[a * i + j] = mv[b, i + j]
        det = _detn(hank, a)
        cdv[b] = det
        if det == 0.0:
            continue
        for col in range(a):
            for i in range(a):
                for j in range(a):
                    if j == col:
                        work[a * i + j] = -mv[b, a + i]
                    else:
                        work[a * i + j] = hank[a * i + j]
            num = _detn(work, a)
            cv[b, col] = num / det
    return c, cd


# ---------------------------------------------------------------------------
# closed-form roots, degree 1..4
# ---------------------------------------------------------------------------

cdef inline void _quad_pair(double complex b, double complex c,
                            double complex* z0, double complex* z1) nogil:
    cdef double complex disc = csqrt(b * b - 4.0 * c)
    cdef double complex q
    if creal(conj(b) * disc) < 0.0:
        disc = -disc
    q = -0.5 * (b + disc)
    z0[0] = q
    if q == 0.0:
        z1[0] = -0.5 * (b - disc)
    else:
        z1[0] = c / q


cdef inline void _cube_pair(double complex g, double complex h,
                            double complex* aa, double complex* bb) nogil:
    cdef double complex r = csqrt(g * g + h * h * h)
    cdef double complex lo = g - r
    cdef double complex hi = g + r
    cdef double complex a3 = lo if cabs(lo) >= cabs(hi) else hi
    cdef double complex a = cpow(a3, 1.0 / 3.0)
    aa[0] = a
    bb[0] = 0.0 if a == 0.0 else -h / a


cdef inline void _roots3_scalar(double complex c0, double complex c1,
                                double complex c2, double complex* z) nogil:
    cdef double complex g = c0 / 2.0 - c1 * c2 / 6.0 + c2 * c2 * c2 / 27.0
    cdef double complex h = c1 / 3.0 - c2 * c2 / 9.0
    cdef double complex a, b, shift
    _cube_pair(g, h, &a, &b)
    shift = -c2 / 3.0
    z[0] = shift - a - b
    z[1] = shift - _W1 * a - _W2 * b
    z[2] = shift - _W2 * a - _W1 * b


cdef inline void _roots4_scalar(double complex c0, double complex c1,
                                double complex c2, double complex c3,
                                double complex* z) nogil:
    cdef double complex g = (72.0 * c0 * c2 + 9.0 * c1 * c2 * c3
                             - 27.0 * c1 * c1 - 27.0 * c0 * c3 * c3
                             - 2.0 * c2 * c2 * c2) / 432.0
    cdef double complex h = (3.0 * c1 * c3 - 12.0 * c0 - c2 * c2) / 36.0
    cdef double complex cc, dd, y, aa, bb, num
    cdef double scale_a, scale_b
    _cube_pair(g, h, &cc, &dd)
    y = c2 / 6.0 - cc - dd
    aa = csqrt(c3 * c3 / 4.0 - c2 + 2.0 * y)
    # a true zero of aa only shows as ~sqrt(eps) after the square root, so
    # the branch cut sits well above that floor; past it, recover whichever
    # of A, B is well conditioned from the identity 2AB = c3 Y - c1 (both
    # tiny means the quartic is a squared quadratic and A = B = 0)
    num = c3 * y - c1
    scale_a = 1.0 + cabs(c3) * cabs(c3) / 4.0 + cabs(c2) + 2.0 * cabs(y)
    scale_b = 1.0 + cabs(y) * cabs(y) + cabs(c0)
    if cabs(aa) > 1e-6 * sqrt(scale_a):
        bb = num / (2.0 * aa)
    else:
        bb = csqrt(y * y - c0)
        if cabs(bb) > 1e-6 * sqrt(scale_b):
            aa = num / (2.0 * bb)
        else:
            aa = 0.0
            bb = 0.0
    _quad_pair(c3 / 2.0 + aa, y + bb, &z[0], &z[1])
    _quad_pair(c3 / 2.0 - aa, y - bb, &z[2], &z[3])


def poly_roots(c):
    """Roots of monic z^a + c_{a-1} z^{a-1} + ... + c_0 for a in 1..4."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] cs = np.ascontiguousarray(
        c, dtype=np.complex128)
    cdef Py_ssize_t nb = cs.shape[0]
    cdef int a = cs.shape[1]
    if not 1 <= a <= 4:
        raise ValueError(f"degree must be 1..4, got {a}")
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] z = np.empty((nb, a), dtype=np.complex128)
    cdef double complex[:, ::1] cv = cs
    cdef double complex[:, ::1] zv = z
    cdef double complex buf[4]
    cdef Py_ssize_t b, j
    for b in range(nb):
        if a == 1:
            zv[b, 0] = -cv[b, 0]
        elif a == 2:
            _quad_pair(cv[b, 1], cv[b, 0], &buf[0], &buf[1])
            zv[b, 0] = buf[0]
            zv[b, 1] = buf[1]
        elif a == 3:
            _roots3_scalar(cv[b, 0], cv[b, 1], cv[b, 2], buf)
            for j in range(3):
                zv[b, j] = buf[j]
        else:
            _roots4_scalar(cv[b, 0], cv[b, 1], cv[b, 2], cv[b, 3], buf)
            for j in range(4):
                zv[b, j] = buf[j]
    return z


# ---------------------------------------------------------------------------
# Vandermonde value solve (Cramer)
# ---------------------------------------------------------------------------

def vandermonde_solve(z, m):
    """Solve V p = m[:, :a] with V[i, j] = z_j^i; returns (p, pd)."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] zs = np.ascontiguousarray(
        z, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] ms = np.ascontiguousarray(
        m, dtype=np.complex128)
    cdef Py_ssize_t nb = zs.shape[0]
    cdef int a = zs.shape[1]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] p = np.zeros((nb, a), dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] pd = np.empty(nb, dtype=np.complex128)
    cdef double complex[:, ::1] zv = zs
    cdef double complex[:, ::1] mv = ms
    cdef double complex[:, ::1] pv = p
    cdef double complex[::1] pdv = pd
    cdef double complex vand[16]
    cdef double complex work[16]
    cdef double complex det, acc
    cdef Py_ssize_t b, i, j, col
    for b in range(nb):
        for j in range(a):
            acc = 1.0
            for i in range(a):
                vand[a * i + j] = acc
                acc = acc * zv[b, j]
        det = 1.0
        for i in range(a):
            for j in range(i + 1, a):
                det = det * (zv[b, j] - zv[b, i])
        pdv[b] = det
        if det == 0.0:
            continue
        for col in range(a):
            for i in range(a):
                for j in range(a):
                    if j == col:
                        work[a * i + j] = mv[b, i]
                    else:
                        work[a * i + j] = vand[a * i + j]
            pv[b, col] = _detn(work, a) / det
    return p, pd


# ---------------------------------------------------------------------------
# pruning evaluation
# ---------------------------------------------------------------------------

def prune_eval(c, k, long long n, long long d):
    """|P(z)| at the d candidate roots exp(2i*pi*(k + t*n/d)/n) per bin."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] cs = np.ascontiguousarray(
        c, dtype=np.complex128)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ks = np.ascontiguousarray(
        k, dtype=np.int64)
    cdef Py_ssize_t nb = cs.shape[0]
    cdef int a = cs.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((nb, d), dtype=np.float64)
    cdef double complex[:, ::1] cv = cs
    cdef cnp.int64_t[::1] kv = ks
    cdef double[:, ::1] ov = out
    cdef double complex base, wd, zt, acc
    cdef Py_ssize_t b, t, j
    wd = cexp(2j * M_PI / d)
    for b in range(nb):
        base = cexp(2j * M_PI * (<double> kv[b]) / (<double> n))
        zt = base
        for t in range(d):
            acc = 1.0
            for j in range(a - 1, -1, -1):
                acc = acc * zt + cv[b, j]
            ov[b, t] = cabs(acc)
            if (t & 511) == 511:
                zt = base * cexp(2j * M_PI * (<double> (t + 1)) / (<double> d))
            else:
                zt = zt * wd
    return out


# ---------------------------------------------------------------------------
# singular values via one-sided Jacobi on the Hankel matrix columns
# ---------------------------------------------------------------------------

cdef void _jacobi_singvals(double complex* mat, int n, double* out) nogil:
    # one-sided Jacobi: orthogonalize columns of the n x n matrix in place;
    # singular values are the final column norms.
    cdef int sweep, p, q, i, rotated
    cdef double app, aqq, g, theta, t, cs, sn
    cdef double complex apq, ph, hp, hq
    for sweep in range(60):
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                app = 0.0
                aqq = 0.0
                apq = 0.0
                for i in range(n):
                    hp = mat[n * i + p]
                    hq = mat[n * i + q]
                    app += creal(hp) * creal(hp) + cimag(hp) * cimag(hp)
                    aqq += creal(hq) * creal(hq) + cimag(hq) * cimag(hq)
                    apq += conj(hp) * hq
                g = cabs(apq)
                if g == 0.0 or g <= 1e-17 * sqrt(app * aqq):
                    continue
                rotated = 1
                theta = (aqq - app) / (2.0 * g)
                if theta >= 0.0:
                    t = 1.0 / (theta + sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + sqrt(1.0 + theta * theta))
                cs = 1.0 / sqrt(1.0 + t * t)
                sn = t * cs
                ph = apq / g
                for i in range(n):
                    hp = mat[n * i + p]
                    hq = mat[n * i + q]
                    mat[n * i + p] = cs * hp - sn * conj(ph) * hq
                    mat[n * i + q] = sn * ph * hp + cs * hq
        if not rotated:
            break
    cdef double norm
    for p in range(n):
        norm = 0.0
        for i in range(n):
            hp = mat[n * i + p]
            norm += creal(hp) * creal(hp) + cimag(hp) * cimag(hp)
        out[p] = sqrt(norm)
    # insertion sort, descending
    cdef double key
    for p in range(1, n):
        key = out[p]
        i = p - 1
        while i >= 0 and out[i] < key:
            out[i + 1] = out[i]
            i -= 1
        out[i + 1] = key


def hankel_singular_values(m, int a_max):
    """Descending singular values of the per-bin a_max x a_max Hankel
    matrices built from syndromes m_0 .. m_{2*a_max-2}."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] ms = np.ascontiguousarray(
        m, dtype=np.complex128)
    if ms.shape[1] < 2 * a_max - 1:
        raise ValueError(
            f"need {2 * a_max - 1} syndromes, got {ms.shape[1]}")
    if not 1 <= a_max <= 4:
        raise ValueError(f"a_max must be 1..4, got {a_max}")
    cdef Py_ssize_t nb = ms.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((nb, a_max), dtype=np.float64)
    cdef double complex[:, ::1] mv = ms
    cdef double[:, ::1] ov = out
    cdef double complex mat[16]
    cdef double sig[4]
    cdef Py_ssize_t b, i, j
    for b in range(nb):
        for i in range(a_max):
            for j in range(a_max):
                mat[a_max * i + j] = mv[b, i + j]
        _jacobi_singvals(mat, a_max, sig)
        for i in range(a_max):
            ov[b, i] = sig[i]
    return out
