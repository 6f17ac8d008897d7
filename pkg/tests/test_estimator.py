"""Matched filter, peak refinement, averaging, calibration, eigen-SNR."""

import math

import numpy as np
import pytest
from scipy.constants import c

from rangekit import (
    ComplexSignal,
    LinkModel,
    ObservationMatrix,
    WaveformSpec,
    apply_channel,
    average_peaks,
    calibrate,
    estimate_snr_eigen,
    generate_pttw,
    generate_ttsfw,
    interpolate_peak,
    matched_filter,
    matched_filter_direct,
)
from rangekit.simulator import _noise

FS = 25e6
RNG = np.random.default_rng(77)


def ttsfw_signal(num_pulses=2, f1=1e6, f2=3e6, dfs=1e6, t_on=250e-6):
    spec = WaveformSpec("TTSFW", f1, f2, t_on, delta_f_step=dfs,
                        num_pulses=num_pulses)
    return spec, generate_ttsfw(spec, FS)


def noisy_delayed(signal, delay_samples, snr_post_db, rng):
    """Delay by a (possibly fractional) sample count and add noise at the
    requested post-matched-filter SNR."""
    link = LinkModel(true_range=delay_samples / FS * c)
    clean = apply_channel(signal, link)
    mags = np.abs(clean.samples)
    on = mags > 1e-3 * mags.max()
    p_on = float(np.mean(mags[on] ** 2))
    gain = int(on.sum())
    var = p_on * gain / 10 ** (snr_post_db / 10.0)
    return ComplexSignal(clean.samples + _noise(rng, var, len(clean.samples)),
                         FS)


class TestMatchedFilter:
    def test_autocorrelation_peak(self):
        _, sig = ttsfw_signal()
        corr = matched_filter(sig, sig)
        idx = np.argmax(np.abs(corr.samples))
        assert corr.times()[idx] == pytest.approx(0.0, abs=1e-12)
        assert np.abs(corr.samples[idx]) == pytest.approx(sig.energy * FS,
                                                          rel=1e-9)

    def test_integer_delay_peak_location(self):
        _, sig = ttsfw_signal()
        delayed = ComplexSignal(
            np.concatenate([np.zeros(40), sig.samples]), FS)
        corr = matched_filter(delayed, sig)
        idx = np.argmax(np.abs(corr.samples))
        assert corr.times()[idx] == pytest.approx(40 / FS, abs=1e-15)

    def test_fft_path_matches_direct_oracle(self):
        _, sig = ttsfw_signal(t_on=20e-6)
        rng = np.random.default_rng(3)
        received = ComplexSignal(
            np.concatenate([np.zeros(17), sig.samples])
            + _noise(rng, 0.01, len(sig) + 17), FS)
        fast = matched_filter(received, sig)
        direct = matched_filter_direct(received, sig)
        assert fast.t0 == direct.t0
        np.testing.assert_allclose(fast.samples, direct.samples,
                                   rtol=1e-9, atol=1e-6)

    def test_notched_lobes_vs_pttw(self):
        spec, sig = ttsfw_signal(num_pulses=2, f1=1e6, f2=3e6, dfs=1e6)
        pttw = generate_pttw(WaveformSpec("PTTW", 1e6, 3e6, 250e-6), FS)
        corr_t = matched_filter(sig, sig)
        corr_p = matched_filter(pttw, pttw)
        mag_t = np.abs(corr_t.samples) / np.abs(corr_t.samples).max()
        mag_p = np.abs(corr_p.samples) / np.abs(corr_p.samples).max()
        lobe = round(FS / spec.pulse_bandwidth)  # 1/df in samples
        center_t = len(sig) - 1
        center_p = len(pttw) - 1
        # odd two-tone lobes survive in the single pulse, notch in the train
        assert mag_p[center_p + lobe] > 0.9
        assert mag_t[center_t + lobe] < 0.1
        assert mag_t[center_t + 2 * lobe] > 0.9

    def test_sample_rate_mismatch_rejected(self):
        _, sig = ttsfw_signal(t_on=20e-6)
        other = ComplexSignal(sig.samples, 2 * FS)
        with pytest.raises(ValueError, match="mismatch"):
            matched_filter(sig, other)

    def test_empty_rejected(self):
        _, sig = ttsfw_signal(t_on=20e-6)
        with pytest.raises(ValueError):
            matched_filter(ComplexSignal(np.zeros(0), FS), sig)


class TestInterpolatePeak:
    def test_on_grid_delay(self):
        _, sig = ttsfw_signal()
        delayed = ComplexSignal(np.concatenate([np.zeros(40), sig.samples]), FS)
        corr = matched_filter(delayed, sig)
        peak = interpolate_peak(corr, factor=8)
        assert peak.delay_s == pytest.approx(40 / FS, abs=1 / (8 * FS))

    def test_factor_one_is_coarse_argmax(self):
        _, sig = ttsfw_signal()
        delayed = ComplexSignal(np.concatenate([np.zeros(40), sig.samples]), FS)
        corr = matched_filter(delayed, sig)
        peak = interpolate_peak(corr, factor=1)
        idx = np.argmax(np.abs(corr.samples))
        assert peak.delay_s == corr.times()[idx]
        assert peak.magnitude == np.abs(corr.samples)[idx]

    def test_fractional_delay_monte_carlo(self):
        # 13.3-sample true delay at 30 dB post-processing SNR
        _, sig = ttsfw_signal(num_pulses=2)
        rng = np.random.default_rng(5)
        tau = 13.3 / FS
        errors = []
        for _ in range(60):
            received = noisy_delayed(sig, 13.3, 30.0, rng)
            corr = matched_filter(received, sig)
            peak = interpolate_peak(corr, factor=8,
                                    search=(tau - 2e-7, tau + 2e-7))
            errors.append((peak.delay_s - tau) * FS)
        rms = math.sqrt(np.mean(np.square(errors)))
        assert rms <= 0.15

    def test_unbiased_at_high_snr_on_grid(self):
        _, sig = ttsfw_signal(num_pulses=2)
        rng = np.random.default_rng(6)
        tau = 40 / FS
        errors = []
        for _ in range(500):
            received = noisy_delayed(sig, 40, 40.0, rng)
            corr = matched_filter(received, sig)
            peak = interpolate_peak(corr, factor=8,
                                    search=(tau - 2e-7, tau + 2e-7))
            errors.append((peak.delay_s - tau) * FS)
        assert abs(np.mean(errors)) < 0.05

    def test_scale_invariance(self):
        _, sig = ttsfw_signal()
        rng = np.random.default_rng(9)
        received = noisy_delayed(sig, 21.4, 40.0, rng)
        corr = matched_filter(received, sig)
        scaled = ComplexSignal(corr.samples * 7.5, FS, corr.t0)
        a = interpolate_peak(corr, factor=8)
        b = interpolate_peak(scaled, factor=8)
        assert b.delay_s == pytest.approx(a.delay_s, abs=1e-18)

    def test_shift_covariance(self):
        _, sig = ttsfw_signal()
        for k in (0, 7, 160):
            delayed = ComplexSignal(
                np.concatenate([np.zeros(k), sig.samples]), FS)
            corr = matched_filter(delayed, sig)
            idx = np.argmax(np.abs(corr.samples))
            assert corr.times()[idx] == pytest.approx(k / FS, abs=1e-15)

    def test_flat_correlation_rejected(self):
        flat = ComplexSignal(np.ones(64), FS)
        with pytest.raises(ValueError, match="flat"):
            interpolate_peak(flat)

    def test_notch_assisted_global_peak(self):
        # with notched neighbors, the global max never lands on a side lobe
        spec, sig = ttsfw_signal(num_pulses=4, f1=1e6, f2=5e6, dfs=1e6)
        rng = np.random.default_rng(13)
        lobe = FS / spec.pulse_bandwidth  # 6.25 samples
        tau = 100.37 / FS
        for _ in range(50):
            received = noisy_delayed(sig, 100.37, 55.0, rng)
            corr = matched_filter(received, sig)
            peak = interpolate_peak(corr, factor=8)
            err_samples = abs(peak.delay_s - tau) * FS
            assert err_samples < 0.5 * lobe

    def test_bad_factor(self):
        _, sig = ttsfw_signal(t_on=20e-6)
        corr = matched_filter(sig, sig)
        with pytest.raises(ValueError):
            interpolate_peak(corr, factor=0)


class TestAveragePeaks:
    def test_identical_inputs(self):
        avg = average_peaks([2e-6] * 10)
        assert avg.delay_s == 2e-6
        assert avg.variance_s2 == 0.0

    def test_simple_mean(self):
        avg = average_peaks([1e-6, 2e-6, 3e-6])
        assert avg.delay_s == pytest.approx(2e-6)

    def test_single_estimate_flagged(self):
        avg = average_peaks([5e-6])
        assert math.isnan(avg.variance_s2)

    def test_order_independence(self):
        values = list(RNG.normal(1e-6, 1e-9, size=1000))
        a = average_peaks(values)
        b = average_peaks(values[::-1])
        assert b.delay_s == pytest.approx(a.delay_s, rel=1e-12)
        assert b.variance_s2 == pytest.approx(a.variance_s2, rel=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            average_peaks([])


class TestCalibrate:
    def test_constant_shift(self):
        offset = calibrate([10.1, 20.1, 30.1], [10.0, 20.0, 30.0])
        assert offset == pytest.approx(0.1, rel=1e-12)

    def test_identity(self):
        assert calibrate([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_offset_linearity(self):
        measured = [10.3, 20.1, 29.8]
        expected = [10.0, 20.0, 30.0]
        base = calibrate(measured, expected)
        shifted = calibrate([m + 5.0 for m in measured], expected)
        assert shifted == pytest.approx(base + 5.0, rel=1e-12)

    def test_zero_mean_residual(self):
        rng = np.random.default_rng(1)
        expected = list(rng.uniform(1, 10, 25))
        measured = [e + 0.37 + rng.normal(0, 0.05) for e in expected]
        offset = calibrate(measured, expected)
        residual = np.mean([m - offset - e for m, e in zip(measured, expected)])
        assert abs(residual) < 1e-12

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            calibrate([1.0], [1.0, 2.0])


class TestEigenSnr:
    def _matrix(self, true_snr_db, n=4096, l=32, seed=0):
        rng = np.random.default_rng(seed)
        t = np.arange(n) / FS
        sig = np.exp(2j * np.pi * 1e6 * t) + np.exp(2j * np.pi * 5e6 * t)
        var = np.mean(np.abs(sig) ** 2) * 10 ** (-true_snr_db / 10.0)
        cols = [sig + _noise(rng, var, n) for _ in range(l)]
        return ObservationMatrix.from_captures(cols)

    def test_noiseless_rank_one(self):
        t = np.arange(1024) / FS
        sig = np.exp(2j * np.pi * 1e6 * t)
        est = estimate_snr_eigen(np.column_stack([sig] * 4))
        assert est.snr_db > 60.0

    def test_twenty_db_within_one_db(self):
        errors = [estimate_snr_eigen(self._matrix(20.0, seed=s)).snr_db - 20.0
                  for s in range(20)]
        assert abs(np.mean(errors)) < 1.0
        assert max(abs(e) for e in errors) < 1.0

    def test_pure_noise_near_zero_linear(self):
        rng = np.random.default_rng(4)
        cols = _noise(rng, 1.0, (4096, 8))
        est = estimate_snr_eigen(cols)
        # eigenvalue spread reports at most a few dB of spurious signal
        assert 10 ** (est.snr_db / 10) < 2.0

    def test_degenerate_floor_flagged(self):
        # orthogonal columns give a flat eigenvalue spectrum: no signal
        cols = np.linalg.qr(_noise(np.random.default_rng(2), 1.0, (64, 8)))[0]
        with pytest.warns(RuntimeWarning, match="-inf"):
            est = estimate_snr_eigen(cols)
        assert est.snr_db == -math.inf

    def test_consistency_improves_with_size(self):
        small = [abs(estimate_snr_eigen(self._matrix(20.0, n=256, l=8,
                                                     seed=s)).snr_db - 20.0)
                 for s in range(10)]
        large = [abs(estimate_snr_eigen(self._matrix(20.0, n=4096, l=32,
                                                     seed=s)).snr_db - 20.0)
                 for s in range(10)]
        assert np.mean(large) < np.mean(small)

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            ObservationMatrix(np.zeros((4, 1), dtype=complex))
        with pytest.raises(ValueError):
            ObservationMatrix(np.zeros((3, 8), dtype=complex))
