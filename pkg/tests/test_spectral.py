import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sfft_dt import spectral
from tests.conftest import np_synthesize, random_sparse, sparse_to_dense


class TestForwardDftOracle:
    def test_zero_signal(self):
        assert np.all(spectral.forward_dft_oracle(np.zeros(8)) == 0)

    def test_dc_case(self):
        out = spectral.forward_dft_oracle(np.full(8, 3.0 - 1.0j))
        assert abs(out[0] - (3.0 - 1.0j)) < 1e-14
        assert np.all(np.abs(out[1:]) < 1e-14)

    def test_single_tone_views(self):
        # spectrum {5: 2}, N=8: the d=4 views at shifts 0 and 1 produce
        # m_0 = 2 and m_1 = 2 e^{i 5 pi / 4} at bin 1
        x = np_synthesize(sparse_to_dense({5: 2.0}, 8))
        m0 = spectral.aliased_values(x, 4, 0)[1]
        m1 = spectral.aliased_values(x, 4, 1)[1]
        assert abs(m0 - 2.0) < 1e-12
        assert abs(m1 - 2.0 * np.exp(1.25j * np.pi)) < 1e-12

    def test_matches_numpy(self, rng):
        x = rng.normal(size=64) + 1j * rng.normal(size=64)
        assert np.allclose(spectral.forward_dft_oracle(x),
                           np.fft.fft(x) / 64, atol=1e-12)


class TestFft:
    def test_impulse(self):
        out = spectral.fft(np.array([1.0, 0, 0, 0]), "sum")
        assert np.allclose(out, np.ones(4), atol=1e-14)

    def test_single_tone(self):
        x = np.exp(2j * np.pi * np.arange(4) / 4)
        out = spectral.fft(x, "sum")
        assert np.allclose(out, [0, 4, 0, 0], atol=1e-12)

    def test_matches_oracle(self, rng):
        x = rng.normal(size=256) + 1j * rng.normal(size=256)
        oracle = spectral.forward_dft_oracle(x)
        ours = spectral.fft(x, "one_over_n")
        assert np.max(np.abs(ours - oracle)) <= 1e-10 * np.max(np.abs(oracle))

    def test_normalization_consistency(self, rng):
        # sum normalization divided by n equals one_over_n elementwise
        x = rng.normal(size=128) + 1j * rng.normal(size=128)
        a = spectral.fft(x, "sum") / 128
        b = spectral.fft(x, "one_over_n")
        assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b))

    def test_non_power_of_two_rejected(self):
        with pytest.raises(ValueError):
            spectral.fft(np.zeros(12))

    def test_synthesis_round_trip(self, rng):
        x = rng.normal(size=512) + 1j * rng.normal(size=512)
        back = spectral.synthesize(spectral.fft(x, "one_over_n"))
        assert np.max(np.abs(back - x)) < 1e-10


class TestDownsample:
    def test_definition(self):
        x = np.array([1, 2, 3, 4], dtype=complex)
        assert np.array_equal(spectral.downsample(x, 2, 0).data, [1, 3])
        assert np.array_equal(spectral.downsample(x, 2, 1).data, [2, 4])

    def test_identity(self, rng):
        x = rng.normal(size=16) + 0j
        assert np.array_equal(spectral.downsample(x, 1, 0).data, x)

    def test_wraparound(self):
        x = np.arange(8, dtype=complex)
        view = spectral.downsample(x, 4, 7)
        assert np.array_equal(view.data, [7, 3])

    def test_invalid_factor(self):
        with pytest.raises(ValueError):
            spectral.downsample(np.zeros(8, complex), 3, 0)

    @given(st.integers(0, 2), st.integers(0, 2),
           st.integers(min_value=0, max_value=2 ** 31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_composition(self, e1, e2, seed):
        # downsampling twice composes into one downsample by the product
        n = 64
        d1, d2 = 2 ** e1, 2 ** e2
        data = np.random.default_rng(seed).normal(size=n) + 0j
        once = spectral.downsample(
            spectral.downsample(data, d1, 0).data, d2, 0).data
        combined = spectral.downsample(data, d1 * d2, 0).data
        assert np.array_equal(once, combined)


class TestSyndromes:
    def test_single_support(self):
        x = np_synthesize(sparse_to_dense({5: 2.0}, 8))
        views = [spectral.transform_view(spectral.downsample(x, 4, l))
                 for l in (0, 1)]
        syn = spectral.syndromes_for_bin(views, 1)
        assert np.allclose(syn.values,
                           [2.0, 2.0 * np.exp(1.25j * np.pi)], atol=1e-12)
        assert list(syn.shifts) == [0, 1]

    def test_zero_signal(self):
        views = [spectral.transform_view(spectral.downsample(
            np.zeros(8, complex), 4, l)) for l in (0, 1)]
        assert np.all(spectral.syndromes_for_bin(views, 0).values == 0)

    def test_collision_sums_values(self):
        # {1: 1, 5: 1} with N=8, d=2: both fold onto bin 1 at shift 0
        x = np_synthesize(sparse_to_dense({1: 1.0, 5: 1.0}, 8))
        view = spectral.transform_view(spectral.downsample(x, 2, 0))
        assert abs(view.values[1] - 2.0) < 1e-12

    def test_aliasing_identity(self, rng):
        # shift-0 syndrome equals the plain aliased sum of spectrum entries
        for n, d in ((64, 8), (1024, 16)):
            truth = random_sparse(rng, n, 12)
            x = np_synthesize(sparse_to_dense(truth, n))
            vals = spectral.aliased_values(x, d, 0)
            m = n // d
            for k in range(m):
                expect = sum(v for s, v in truth.items() if s % m == k)
                assert abs(vals[k] - expect) < 1e-9

    def test_shift_identity(self, rng):
        # shift-l syndrome carries the per-entry phase e^{2i pi s l / n}
        n, d, l = 256, 8, 5
        truth = random_sparse(rng, n, 10)
        x = np_synthesize(sparse_to_dense(truth, n))
        vals = spectral.aliased_values(x, d, l)
        m = n // d
        for k in range(m):
            expect = sum(v * np.exp(2j * np.pi * s * l / n)
                         for s, v in truth.items() if s % m == k)
            assert abs(vals[k] - expect) < 1e-9

    def test_bin_out_of_range(self):
        views = [spectral.transform_view(spectral.downsample(
            np.zeros(8, complex), 4, 0))]
        with pytest.raises(ValueError):
            spectral.syndromes_for_bin(views, 2)


class TestSnr:
    def test_exact_match_is_inf(self, rng):
        ref = rng.normal(size=16) + 0j
        assert spectral.snr(ref, ref.copy()) == math.inf

    def test_ten_db(self):
        ref = np.ones(4, dtype=complex)
        est = np.ones(4, dtype=complex) * (1 + np.sqrt(0.1))
        # estimate mean square / error mean square = (1+sqrt(.1))^2 / .1
        expect = 10 * math.log10((1 + math.sqrt(0.1)) ** 2 / 0.1)
        assert abs(spectral.snr(ref, est) - expect) < 1e-12

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            spectral.snr(np.zeros(8), np.zeros(4))

    def test_sparse_estimate(self):
        ref = np.array([1.0, 0, 0, 0], dtype=complex)
        est = spectral.SparseSpectrum(4, {0: 1.0 + 0j})
        assert spectral.snr(ref, est) == math.inf


class TestSparseSpectrum:
    def test_round_trip_dense(self, rng):
        entries = random_sparse(rng, 32, 5)
        spec = spectral.SparseSpectrum(32, entries)
        back = spectral.SparseSpectrum.from_dense(spec.to_dense())
        assert back.entries == entries

    def test_top_k(self):
        dense = np.array([0.1, 5.0, 0.2, 3.0], dtype=complex)
        spec = spectral.SparseSpectrum.from_dense(dense, k=2)
        assert set(spec.entries) == {1, 3}

    def test_invalid_index(self):
        with pytest.raises(ValueError):
            spectral.SparseSpectrum(4, {7: 1.0})
