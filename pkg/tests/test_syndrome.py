import numpy as np
import pytest

from sfft_dt import syndrome
from tests.conftest import np_synthesize, sparse_to_dense


def forward_syndromes(values, roots, count):
    """Generate m_l = sum_j p_j z_j^l directly."""
    values = np.asarray(values, dtype=complex)
    roots = np.asarray(roots, dtype=complex)
    return np.array([np.sum(values * roots ** l) for l in range(count)])


def deflate_newton_roots(c):
    """Independent root oracle: Newton iteration plus synthetic-division
    deflation on the monic polynomial z^a + c[a-1] z^{a-1} + ... + c[0]."""
    full = np.concatenate(([1.0 + 0j], c[::-1]))  # descending powers
    work = full.copy()
    roots = []
    for _ in range(len(c)):
        z = 0.4 + 0.9j  # generic start off the usual symmetry axes
        for _ in range(200):
            p = np.polyval(work, z)
            dp = np.polyval(np.polyder(work), z)
            if dp == 0:
                z += 1e-3
                continue
            step = p / dp
            z -= step
            if abs(step) < 1e-14:
                break
        roots.append(z)
        # synthetic division by (z - root)
        out = np.empty(len(work) - 1, dtype=complex)
        acc = 0j
        for i, coef in enumerate(work[:-1]):
            acc = coef + acc * z
            out[i] = acc
        work = out
    # polish every root on the original polynomial
    der = np.polyder(full)
    polished = []
    for z in roots:
        for _ in range(50):
            p = np.polyval(full, z)
            dp = np.polyval(der, z)
            if dp == 0:
                break
            step = p / dp
            z -= step
            if abs(step) < 5e-16:
                break
        polished.append(z)
    return np.array(polished)


def match_roots(got, expect):
    """Greedy multiset match; returns the max pairing distance."""
    got = list(got)
    worst = 0.0
    for e in expect:
        i = int(np.argmin([abs(g - e) for g in got]))
        worst = max(worst, abs(got.pop(i) - e))
    return worst


class TestSolveCoefficients:
    def test_a1_ratio(self):
        m = forward_syndromes([2.0], [np.exp(0.5j)], 2)
        coeffs = syndrome.solve_coefficients(m, 1)
        assert abs(-coeffs.c[0] - m[1] / m[0]) < 1e-14

    def test_a2_plus_minus_one(self):
        # roots {1, -1} with unit values: m = (2, 0, 2, 0)
        m = forward_syndromes([1.0, 1.0], [1.0, -1.0], 4)
        assert np.allclose(m, [2, 0, 2, 0])
        coeffs = syndrome.solve_coefficients(m, 2)
        assert np.allclose(coeffs.c, [-1.0, 0.0], atol=1e-14)

    def test_duplicate_root_near_singular(self):
        m = forward_syndromes([1.0, 1.0], [1.0, 1.0], 4)
        with pytest.raises(syndrome.NearSingular):
            syndrome.solve_coefficients(m, 2)

    def test_polynomial_identity(self, rng):
        # coefficients reproduce the elementary-symmetric expansion
        for a in (2, 3, 4):
            roots = np.exp(2j * np.pi * rng.random(a))
            vals = rng.normal(size=a) + 1j * rng.normal(size=a)
            m = forward_syndromes(vals, roots, 2 * a)
            coeffs = syndrome.solve_coefficients(m, a)
            expect = np.poly(roots)[1:][::-1]  # c_0 .. c_{a-1}
            assert np.max(np.abs(coeffs.c - expect)) < 1e-9


class TestRootsClosedForm:
    def test_factored_quadratic(self):
        # (z - 1)(z - i) = z^2 - (1+i) z + i
        coeffs = syndrome.PolyCoefficients(2, np.array([1j, -(1 + 1j)]))
        roots = syndrome.roots_closed_form(coeffs)
        assert match_roots(roots, [1.0, 1.0j]) < 1e-12

    def test_factored_cubic(self):
        expect = np.array([1.0, -1.0, 1.0j])
        c = np.poly(expect)[1:][::-1]
        roots = syndrome.roots_closed_form(syndrome.PolyCoefficients(3, c))
        assert match_roots(roots, expect) < 1e-12

    def test_quartic_eighth_roots(self, rng):
        pool = np.exp(2j * np.pi * np.arange(8) / 8)
        for _ in range(50):
            expect = rng.choice(pool, size=4, replace=False)
            c = np.poly(expect)[1:][::-1]
            roots = syndrome.roots_closed_form(syndrome.PolyCoefficients(4, c))
            oracle = deflate_newton_roots(c)
            assert match_roots(roots, expect) < 1e-8
            assert match_roots(roots, oracle) < 1e-8

    def test_residual_bound(self, rng):
        for a in (2, 3, 4):
            for _ in range(200):
                expect = np.exp(2j * np.pi * rng.random(a))
                c = np.poly(expect)[1:][::-1]
                roots = syndrome.roots_closed_form(
                    syndrome.PolyCoefficients(a, c))
                resid = syndrome.poly_residuals(c[None, :], roots[None, :])
                assert resid.max() <= 1e-8 * max(1.0, np.abs(c).max())


class TestSolveValues:
    def test_a1(self):
        m = forward_syndromes([3.0 + 1j], [np.exp(0.3j)], 2)
        vals = syndrome.solve_values(m, [np.exp(0.3j)])
        assert abs(vals[0] - m[0]) < 1e-14

    def test_a2_example(self):
        m = np.array([2.0, 0.0, 2.0, 0.0], dtype=complex)
        vals = syndrome.solve_values(m, [1.0, -1.0])
        assert np.allclose(vals, [1.0, 1.0], atol=1e-14)
        # decoded pair reproduces all four syndromes
        recon = forward_syndromes(vals, [1.0, -1.0], 4)
        assert np.max(np.abs(recon - m)) < 1e-12

    def test_repeated_roots_ill_conditioned(self):
        with pytest.raises(syndrome.IllConditioned):
            syndrome.solve_values(np.array([2.0, 2.0, 2.0, 2.0]), [1.0, 1.0])

    def test_value_sum_matches_first_syndrome(self, rng):
        for a in (2, 3, 4):
            roots = np.exp(2j * np.pi * rng.random(a))
            vals = rng.normal(size=a) + 1j * rng.normal(size=a)
            m = forward_syndromes(vals, roots, 2 * a)
            got = syndrome.solve_values(m, roots)
            assert abs(np.sum(got) - m[0]) < 1e-8 * max(1.0, abs(m[0]))


class TestRootToLocation:
    def test_unity(self):
        assert syndrome.root_to_location(1.0 + 0j, 8) == (0, 0.0)

    def test_five_pi_over_four(self):
        loc, err = syndrome.root_to_location(np.exp(1.25j * np.pi), 8)
        assert loc == 5 and err < 1e-12

    def test_snap_robustness(self):
        loc, err = syndrome.root_to_location(
            np.exp(1j * (1.25 * np.pi + 1e-9)), 8)
        assert loc == 5 and err < 1e-8

    def test_zero_root_rejected(self):
        with pytest.raises(ValueError):
            syndrome.root_to_location(0j, 8)


class TestDecodeBin:
    def test_single_tone(self):
        from sfft_dt import spectral
        x = np_synthesize(sparse_to_dense({5: 2.0}, 8))
        m = np.array([spectral.aliased_values(x, 4, l)[1] for l in (0, 1)])
        dec = syndrome.decode_bin(m, 1, 8, 4, 1)
        assert list(dec.locations) == [5]
        assert abs(dec.values[0] - 2.0) < 1e-10
        assert dec.membership and dec.snap_error < 1e-9

    def test_wrong_model_detected(self):
        # two collisions decoded under a=1: recovered location leaves the
        # bin's candidate set
        n, d, k = 4096, 16, 3
        m_len = n // d
        locs = [k + 256 * 2, k + 256 * 9]
        vals = [1.3 + 0.7j, -0.4 + 2.1j]
        roots = [np.exp(2j * np.pi * s / n) for s in locs]
        m = forward_syndromes(vals, roots, 2)
        dec = syndrome.decode_bin(m, 1, n, d, k)
        assert dec.locations[0] % m_len != k or not dec.membership
        assert not dec.membership

    def test_round_trip_random(self, rng):
        # forward-generate syndromes from random in-bin supports and decode
        for trial in range(60):
            n = int(rng.choice([64, 256, 1024]))
            d = int(rng.choice([2, 4, 8, 16]))
            m_len = n // d
            a = int(rng.integers(1, min(4, d) + 1))
            k = int(rng.integers(0, m_len))
            ts = rng.choice(d, size=a, replace=False)
            locs = (k + ts * m_len) % n
            vals = rng.normal(size=a) + 1j * rng.normal(size=a)
            roots = np.exp(2j * np.pi * locs / n)
            m = forward_syndromes(vals, roots, 2 * a)
            dec = syndrome.decode_bin(m, a, n, d, k)
            assert dec.membership
            assert sorted(dec.locations) == sorted(locs)
            got = {int(s): v for s, v in zip(dec.locations, dec.values)}
            for s, v in zip(locs, vals):
                assert abs(got[int(s)] - v) <= 1e-7 * abs(v)

    def test_membership_rejects_larger_models(self, rng):
        # syndromes generated with a' > a collisions: the a-model decode
        # must fail the membership test nearly always
        n, d = 4096, 16
        m_len = n // d
        rejected = 0
        trials = 2000
        for _ in range(trials):
            a = int(rng.integers(1, 4))
            a_true = int(rng.integers(a + 1, 5))
            k = int(rng.integers(0, m_len))
            ts = rng.choice(d, size=a_true, replace=False)
            locs = (k + ts * m_len) % n
            vals = rng.normal(size=a_true) + 1j * rng.normal(size=a_true)
            m = forward_syndromes(vals, np.exp(2j * np.pi * locs / n), 2 * a)
            try:
                dec = syndrome.decode_bin(m, a, n, d, k)
            except (syndrome.NearSingular, syndrome.IllConditioned,
                    syndrome.DegenerateBranch):
                rejected += 1
                continue
            if not dec.membership or dec.snap_error > 0.25:
                rejected += 1
        assert rejected / trials >= 0.99

    def test_syndrome_consistency(self, rng):
        # decoded (values, roots) reproduce all 2a input syndromes
        for a in (2, 3, 4):
            n, d = 1024, 8
            m_len = n // d
            k = 5
            ts = rng.choice(d, size=a, replace=False)
            locs = (k + ts * m_len) % n
            vals = rng.normal(size=a) + 1j * rng.normal(size=a)
            m = forward_syndromes(vals, np.exp(2j * np.pi * locs / n), 2 * a)
            dec = syndrome.decode_bin(m, a, n, d, k)
            recon = forward_syndromes(dec.values, dec.roots, 2 * a)
            assert np.max(np.abs(recon - m)) <= 1e-6 * np.max(np.abs(m))
