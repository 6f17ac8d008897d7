"""Cramer-Rao lower bounds on delay-estimation variance.

For a known waveform in white Gaussian noise the delay variance of any
unbiased estimator is bounded by

    var >= 1 / (2 * SNR * msbw)

where ``msbw`` is the energy-normalized mean-square bandwidth in rad^2/s^2
(the second moment of the energy spectrum, less the squared mean-frequency
term, which vanishes for spectra symmetric about their centroid) and SNR is
taken here as the post-matched-filter value: the pre-processing SNR times
the time-bandwidth processing gain.  Both pre and post values are echoed in
every report.

Closed forms:

* two-tone, separation df:            msbw = pi^2 * df^2
* two-tone stepped train (N, df, dfs): msbw = pi^2*df^2
                                            + (2*pi*dfs)^2/N * sum(n^2)
* full-band chirp over BW:            msbw = (pi*BW)^2 / 3

The stepped-train form takes the step-offset moment about step 0, matching
the bound curve this library reproduces; the variance of the actual tone-set
spectrum (what ``numeric_msbw`` measures on a generated signal) centers the
step offsets and is provided separately as ``ttsfw_centered_msbw``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

LINK_TYPES = ("one_way", "two_way")


@dataclass(frozen=True)
class NoiseSpec:
    """Receiver noise and integration description.

    Attributes:
        snr_db: pre-processing SNR at the receiver input, dB.
        noise_bandwidth: Hz (the full complex sampling band for white noise).
        integration_time: total pulse on-time integrated by the matched
            filter, seconds.
    """

    snr_db: float
    noise_bandwidth: float
    integration_time: float

    def __post_init__(self):
        if not math.isfinite(self.snr_db):
            raise ValueError("snr_db must be finite")
        if self.noise_bandwidth <= 0 or self.integration_time <= 0:
            raise ValueError("noise_bandwidth and integration_time must be positive")
        if self.integration_time * self.noise_bandwidth < 1.0:
            raise ValueError("time-bandwidth product < 1 gives negative processing gain")

    @property
    def processing_gain_db(self) -> float:
        return processing_gain_db(self.integration_time, self.noise_bandwidth)

    @property
    def snr_post_db(self) -> float:
        return self.snr_db + self.processing_gain_db


@dataclass(frozen=True)
class CrlbReport:
    """Delay-variance bound with unit conversions.

    ``snr_linear`` is the post-processing linear SNR actually used in the
    bound; ``params_echo`` carries the inputs including the pre-processing
    SNR and the processing gain.
    """

    mean_square_bandwidth: float   # rad^2/s^2
    mean_frequency_sq: float       # rad^2/s^2 (0 for symmetric spectra)
    snr_linear: float
    variance_bound: float          # s^2
    std_bound: float               # s
    range_std_bound: float         # m
    params_echo: dict

    def __post_init__(self):
        if self.variance_bound <= 0:
            raise ValueError("variance_bound must be positive")


def processing_gain_db(integration_time: float, noise_bandwidth: float) -> float:
    """Matched-filter processing gain: 10*log10(time-bandwidth product)."""
    if integration_time <= 0 or noise_bandwidth <= 0:
        raise ValueError("integration_time and noise_bandwidth must be positive")
    return 10.0 * math.log10(integration_time * noise_bandwidth)


def _report(msbw: float, snr: NoiseSpec, link_type: str, extra: dict) -> CrlbReport:
    if link_type not in LINK_TYPES:
        raise ValueError(f"link_type must be one of {LINK_TYPES}")
    snr_post = 10.0 ** (snr.snr_post_db / 10.0)
    variance = 1.0 / (2.0 * snr_post * msbw)
    std = math.sqrt(variance)
    range_scale = SPEED_OF_LIGHT / 2.0 if link_type == "two_way" else SPEED_OF_LIGHT
    echo = {
        "snr_pre_db": snr.snr_db,
        "processing_gain_db": snr.processing_gain_db,
        "snr_post_db": snr.snr_post_db,
        "noise_bandwidth_hz": snr.noise_bandwidth,
        "integration_time_s": snr.integration_time,
        "link_type": link_type,
    }
    echo.update(extra)
    return CrlbReport(
        mean_square_bandwidth=msbw,
        mean_frequency_sq=0.0,
        snr_linear=snr_post,
        variance_bound=variance,
        std_bound=std,
        range_std_bound=range_scale * std,
        params_echo=echo,
    )


def crlb_two_tone(delta_f: float, snr: NoiseSpec,
                  link_type: str = "two_way") -> CrlbReport:
    """Bound for a two-tone waveform with tone separation delta_f.

    Concentrating all energy at the band edges maximizes the mean-square
    bandwidth, so this is the lowest delay variance any waveform confined to
    delta_f can reach: var = 1 / (2 * SNR_post * pi^2 * delta_f^2).
    """
    if delta_f <= 0:
        raise ValueError("delta_f must be positive")
    msbw = math.pi ** 2 * delta_f ** 2
    return _report(msbw, snr, link_type, {"delta_f_hz": delta_f})


def ttsfw_msbw(num_pulses: int, delta_f_pulse: float, delta_f_step: float) -> float:
    """Mean-square bandwidth of the two-tone stepped train used by the bound:
    pi^2*df^2 + (2*pi*dfs)^2/N * sum_{n=0}^{N-1} n^2."""
    if num_pulses < 1:
        raise ValueError("num_pulses must be >= 1")
    n = num_pulses
    step_sum = (n - 1) * n * (2 * n - 1) // 6  # sum of squares 0..N-1
    return (
        math.pi ** 2 * delta_f_pulse ** 2
        + (2.0 * math.pi * delta_f_step) ** 2 / n * step_sum
    )


def ttsfw_centered_msbw(num_pulses: int, delta_f_pulse: float,
                        delta_f_step: float) -> float:
    """Variance of the two-tone stepped train's tone-set spectrum about its
    mean frequency: pi^2*df^2 + (2*pi*dfs)^2 * (N^2 - 1) / 12.

    This is what a spectral second-moment measurement of a generated
    waveform converges to; it equals ``ttsfw_msbw`` only at N=1, because the
    bound form takes the step moment about step 0 rather than the step mean.
    """
    if num_pulses < 1:
        raise ValueError("num_pulses must be >= 1")
    n = num_pulses
    return (
        math.pi ** 2 * delta_f_pulse ** 2
        + (2.0 * math.pi * delta_f_step) ** 2 * (n * n - 1) / 12.0
    )


def crlb_ttsfw(num_pulses: int, delta_f_pulse: float, delta_f_step: float,
               snr: NoiseSpec, link_type: str = "two_way") -> CrlbReport:
    """Bound for an N-pulse two-tone stepped-frequency train.

    Reduces exactly to ``crlb_two_tone(delta_f_pulse)`` at N=1 (the step sum
    vanishes).
    """
    msbw = ttsfw_msbw(num_pulses, delta_f_pulse, delta_f_step)
    return _report(msbw, snr, link_type, {
        "num_pulses": num_pulses,
        "delta_f_pulse_hz": delta_f_pulse,
        "delta_f_step_hz": delta_f_step,
    })


def scalability_params(total_bw: float, num_pulses: int) -> tuple[float, float]:
    """Step and pulse bandwidth filling a total band with N pulses.

    The tone set {f1 + n*dfs, f2 + n*dfs} spans exactly (2N-1)*dfs, so
    dfs = BW/(2N-1) and df = N*dfs.  Returns (delta_f_step, delta_f_pulse).
    """
    if total_bw <= 0:
        raise ValueError("total_bw must be positive")
    if num_pulses < 1:
        raise ValueError("num_pulses must be >= 1")
    delta_f_step = total_bw / (2 * num_pulses - 1)
    return delta_f_step, num_pulses * delta_f_step


def crlb_limits(total_bw: float) -> tuple[float, float]:
    """Large-N mean-square bandwidth plateau, split into its two terms.

    Returns ((pi*BW)^2/4, (pi*BW)^2/3): the half-band two-tone term the
    per-pulse bandwidth approaches, and the term a constant-amplitude chirp
    over the full band attains.  Their sum is the N->infinity limit of the
    stepped-train mean-square bandwidth under ``scalability_params``.
    """
    if total_bw <= 0:
        raise ValueError("total_bw must be positive")
    pb2 = (math.pi * total_bw) ** 2
    return pb2 / 4.0, pb2 / 3.0


def numeric_msbw(signal) -> float:
    """Energy-normalized second moment of a signal's spectrum about its mean
    frequency, rad^2/s^2, by discrete integration of the FFT.

    Serves as the independent oracle for the closed-form mean-square
    bandwidths (finite-pulse broadening accounts for the small residual).
    """
    samples = np.asarray(signal.samples)
    if len(samples) == 0:
        raise ValueError("empty signal")
    spectrum = np.fft.fft(samples)
    esd = np.abs(spectrum) ** 2
    energy = float(np.sum(esd))
    if energy <= 0.0:
        raise ValueError("zero-energy signal")
    freqs = np.fft.fftfreq(len(samples), d=1.0 / signal.sample_rate)
    mean_f = float(np.sum(freqs * esd)) / energy
    var_f = float(np.sum((freqs - mean_f) ** 2 * esd)) / energy
    return (2.0 * math.pi) ** 2 * var_f
