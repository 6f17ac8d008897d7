"""Delay-variance bounds: closed forms, scaling laws, and the numeric
spectral-moment oracle."""

import math

import numpy as np
import pytest

from rangekit import (
    ComplexSignal,
    NoiseSpec,
    WaveformSpec,
    crlb_limits,
    crlb_ttsfw,
    crlb_two_tone,
    generate_lfm,
    generate_pttw,
    generate_ttsfw,
    numeric_msbw,
    processing_gain_db,
    scalability_params,
    ttsfw_centered_msbw,
    ttsfw_msbw,
)

FS = 25e6
NOISE_38DB = NoiseSpec(snr_db=30.0, noise_bandwidth=12.5e6,
                       integration_time=0.5e-3)


class TestProcessingGain:
    def test_reference_value(self):
        assert processing_gain_db(0.5e-3, 12.5e6) == pytest.approx(38.0, abs=0.1)

    def test_unity_product(self):
        assert processing_gain_db(1e-3, 1e3) == pytest.approx(0.0, abs=1e-12)

    def test_decade(self):
        assert processing_gain_db(1e-2, 1e4) == pytest.approx(20.0, abs=1e-12)

    def test_negative_gain_rejected_in_spec(self):
        with pytest.raises(ValueError):
            NoiseSpec(snr_db=30.0, noise_bandwidth=10.0, integration_time=1e-3)


class TestTwoTone:
    def test_reference_variance(self):
        # 30 dB pre + 38 dB gain at 4 MHz separation
        rep = crlb_two_tone(4e6, NOISE_38DB)
        assert rep.variance_bound == pytest.approx(5.02e-22, rel=0.01)

    def test_snr_monotonicity(self):
        variances = [
            crlb_two_tone(4e6, NoiseSpec(s, 12.5e6, 0.5e-3)).variance_bound
            for s in (10.0, 20.0, 30.0, 40.0)
        ]
        assert all(a > b for a, b in zip(variances, variances[1:]))

    def test_bandwidth_quadratic(self):
        v1 = crlb_two_tone(4e6, NOISE_38DB).variance_bound
        v2 = crlb_two_tone(8e6, NOISE_38DB).variance_bound
        assert v1 / v2 == pytest.approx(4.0, rel=1e-12)

    def test_snr_linearity_invariant(self):
        # variance times linear SNR is constant for fixed waveform parameters
        products = []
        for s in (0.0, 15.0, 30.0):
            rep = crlb_two_tone(4e6, NoiseSpec(s, 12.5e6, 0.5e-3))
            products.append(rep.variance_bound * rep.snr_linear)
        assert products[1] == pytest.approx(products[0], rel=1e-12)
        assert products[2] == pytest.approx(products[0], rel=1e-12)

    def test_nonpositive_separation_rejected(self):
        with pytest.raises(ValueError):
            crlb_two_tone(0.0, NOISE_38DB)

    def test_range_conversion(self):
        two = crlb_two_tone(4e6, NOISE_38DB, link_type="two_way")
        one = crlb_two_tone(4e6, NOISE_38DB, link_type="one_way")
        assert one.range_std_bound == pytest.approx(2 * two.range_std_bound)


class TestTtsfwBound:
    def test_single_pulse_equals_two_tone_exactly(self):
        two = crlb_two_tone(4e6, NOISE_38DB)
        train = crlb_ttsfw(1, 4e6, 123.456, NOISE_38DB)
        assert train.variance_bound == two.variance_bound  # machine precision

    def test_two_pulse_scalability_hand_value(self):
        bw = 4e6
        dfs, dfp = scalability_params(bw, 2)
        assert dfs == pytest.approx(bw / 3)
        assert dfp == pytest.approx(2 * bw / 3)
        zeta = ttsfw_msbw(2, dfp, dfs)
        assert zeta == pytest.approx((2.0 / 3.0) * math.pi ** 2 * bw ** 2,
                                     rel=1e-12)

    def test_zero_pulses_rejected(self):
        with pytest.raises(ValueError):
            crlb_ttsfw(0, 4e6, 1e6, NOISE_38DB)

    def test_msbw_strictly_decreasing_to_plateau(self):
        bw = 4e6
        term_a, term_b = crlb_limits(bw)
        values = []
        for n in range(1, 1001):
            dfs, dfp = scalability_params(bw, n)
            values.append(ttsfw_msbw(n, dfp, dfs))
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[0] == pytest.approx(math.pi ** 2 * bw ** 2, rel=1e-12)
        assert values[-1] == pytest.approx(term_a + term_b, rel=0.01)


class TestScalability:
    def test_single_pulse_fills_band(self):
        assert scalability_params(4e6, 1) == (pytest.approx(4e6),
                                              pytest.approx(4e6))

    def test_two_pulse_values(self):
        dfs, dfp = scalability_params(4e6, 2)
        assert dfs == pytest.approx(4e6 / 3)
        assert dfp == pytest.approx(8e6 / 3)

    def test_pulse_bandwidth_approaches_half_band(self):
        _, dfp = scalability_params(4e6, 100000)
        assert dfp == pytest.approx(2e6, rel=1e-4)


class TestLimits:
    def test_reference_values(self):
        a, b = crlb_limits(4e6)
        assert a == pytest.approx(3.948e13, rel=1e-3)
        assert b == pytest.approx(5.264e13, rel=1e-3)

    def test_exact_ratio(self):
        a, b = crlb_limits(7e6)
        assert a / b == pytest.approx(0.75, rel=1e-14)

    def test_large_n_convergence(self):
        bw = 4e6
        dfs, dfp = scalability_params(bw, 1000)
        assert ttsfw_msbw(1000, dfp, dfs) == pytest.approx(sum(crlb_limits(bw)),
                                                           rel=0.01)


class TestNumericMsbw:
    def test_two_tone_segment(self):
        # continuous (ungated) two-tone segment at 4 MHz separation
        t = np.arange(round(1e-3 * FS)) / FS
        sig = ComplexSignal(np.exp(2j * np.pi * 1e6 * t)
                            + np.exp(2j * np.pi * 5e6 * t), FS)
        assert numeric_msbw(sig) == pytest.approx(
            math.pi ** 2 * (4e6) ** 2, rel=0.02)

    def test_single_tone_negligible(self):
        t = np.arange(25000) / FS
        sig = ComplexSignal(np.exp(2j * np.pi * 1e6 * t), FS)
        assert numeric_msbw(sig) < 1e-6 * math.pi ** 2 * (4e6) ** 2

    def test_gated_two_tone(self):
        spec = WaveformSpec("PTTW", 1e6, 5e6, 1e-3)
        sig = generate_pttw(spec, FS)
        assert numeric_msbw(sig) == pytest.approx(
            math.pi ** 2 * (4e6) ** 2, rel=0.02)

    def test_lfm_matches_third_band_law(self):
        sig = generate_lfm(4e6, 1e-3, FS)
        assert numeric_msbw(sig) == pytest.approx((math.pi * 4e6) ** 2 / 3,
                                                  rel=0.02)

    def test_ttsfw_matches_centered_closed_form(self):
        spec = WaveformSpec("TTSFW", 1e6, 5e6, 250e-6, delta_f_step=1e6,
                            num_pulses=4)
        sig = generate_ttsfw(spec, FS)
        assert numeric_msbw(sig) == pytest.approx(
            ttsfw_centered_msbw(4, 4e6, 1e6), rel=0.02)

    def test_centered_vs_bound_form_reduce_at_single_pulse(self):
        assert ttsfw_centered_msbw(1, 4e6, 1e6) == ttsfw_msbw(1, 4e6, 1e6)

    def test_zero_energy_rejected(self):
        sig = ComplexSignal(np.zeros(100), FS)
        with pytest.raises(ValueError, match="zero-energy"):
            numeric_msbw(sig)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            numeric_msbw(ComplexSignal(np.zeros(0), FS))
