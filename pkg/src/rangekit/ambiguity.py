"""Delay-Doppler ambiguity surfaces for the ranging waveforms.

The ambiguity function is the self-correlation of a waveform against a
Doppler-shifted copy,

    AF(t, f_D) = integral S*(tau - t) S(tau) exp(j 2 pi f_D tau) dtau,

evaluated here two ways: numerically from a sampled signal (the authoritative
route), and in closed form for the pulse-train waveforms within the central
delay strip |t| < T where pulses only overlap their own time slot.

For an N-pulse two-tone train with step order sigma the closed form is

    |AF| = (T-|t|) * | (e^{j2pi f1 t} + e^{j2pi f2 t}) sinc(f_D L) D(f_D)
           + e^{j pi (f1+f2) t} [ e^{+j pi df T} sinc((f_D+df) L) D(f_D+df)
                                + e^{-j pi df T} sinc((f_D-df) L) D(f_D-df) ] |

with L = T-|t|, df = f2-f1, sinc(x) = sin(pi x)/(pi x), and the slot sum

    D(x) = (1/N) sum_n exp(j 2 pi (sigma(n) dfs t + x n T_r)),

which for the identity order is the Dirichlet kernel
sin(pi N (dfs t + x T_r)) / (N sin(pi (dfs t + x T_r))).  Its nulls notch out
N-1 of every N correlation lobes of the underlying two-tone pulse, which is
what makes the stepped train unambiguous in practice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.signal import fftconvolve

from .waveforms import ComplexSignal, WaveformSpec


@dataclass(eq=False)
class AmbiguitySurface:
    """|AF| sampled on a delay-Doppler grid, peak-normalized to 1.

    ``magnitude`` has shape (len(doppler_axis), len(delay_axis)); rows are
    Doppler cuts.
    """

    delay_axis: np.ndarray    # seconds
    doppler_axis: np.ndarray  # Hz
    magnitude: np.ndarray
    source: str               # "analytic" or "numeric"

    def __post_init__(self):
        self.delay_axis = np.asarray(self.delay_axis, dtype=float)
        self.doppler_axis = np.asarray(self.doppler_axis, dtype=float)
        self.magnitude = np.asarray(self.magnitude, dtype=float)
        if self.magnitude.shape != (len(self.doppler_axis), len(self.delay_axis)):
            raise ValueError("magnitude shape does not match the axes")

    def peak_cell(self) -> tuple[float, float]:
        """(delay, doppler) of the grid argmax."""
        i, j = np.unravel_index(np.argmax(self.magnitude), self.magnitude.shape)
        return float(self.delay_axis[j]), float(self.doppler_axis[i])

    def zero_doppler_cut(self) -> np.ndarray:
        """Magnitude row at the Doppler grid point nearest 0 Hz."""
        i = int(np.argmin(np.abs(self.doppler_axis)))
        return self.magnitude[i]


def default_axes(spec: WaveformSpec, points: int = 201) -> tuple[np.ndarray, np.ndarray]:
    """Default grid: delay span +-2/step (capped at the pulse width), Doppler
    span +-2/T, ``points`` samples each."""
    if spec.delta_f_step > 0:
        delay_span = min(2.0 / spec.delta_f_step, spec.pulse_duration)
    else:
        delay_span = spec.pulse_duration
    doppler_span = 2.0 / spec.pulse_duration
    return (
        np.linspace(-delay_span, delay_span, points),
        np.linspace(-doppler_span, doppler_span, points),
    )


def ambiguity_numeric(signal: ComplexSignal, delay_axis,
                      doppler_axis) -> AmbiguitySurface:
    """Discretized ambiguity surface of a sampled signal.

    Each Doppler row modulates the signal by exp(j 2 pi f_D tau) and
    cross-correlates it with the unshifted signal; rows are sampled onto the
    requested delay axis (exact on sample lags, linear in between) and the
    grid is peak-normalized.
    """
    delay_axis = np.asarray(delay_axis, dtype=float)
    doppler_axis = np.asarray(doppler_axis, dtype=float)
    if delay_axis.size == 0 or doppler_axis.size == 0:
        raise ValueError("empty delay or Doppler grid")
    if np.max(np.abs(delay_axis)) > signal.duration:
        raise ValueError("delay axis extends beyond the signal duration")
    s = signal.samples
    tau = signal.times()
    n = len(s)
    lags = (np.arange(2 * n - 1) - (n - 1)) / signal.sample_rate
    ref_rev = np.conj(s[::-1])
    rows = np.empty((len(doppler_axis), len(delay_axis)))
    for i, f_d in enumerate(doppler_axis):
        shifted = s * np.exp(2j * np.pi * f_d * tau)
        corr = fftconvolve(shifted, ref_rev) / signal.sample_rate
        rows[i] = np.interp(delay_axis, lags, np.abs(corr))
    peak = rows.max()
    if peak > 0:
        rows /= peak
    return AmbiguitySurface(delay_axis, doppler_axis, rows, source="numeric")


def _slot_sum(spec: WaveformSpec, t, x):
    """(1/N) sum_n exp(j 2 pi (sigma(n) dfs t + x n T_r)); Dirichlet kernel
    in (dfs t + x T_r) for the identity step order."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    acc = np.zeros(np.broadcast(t, x).shape, dtype=np.complex128)
    for slot, step in enumerate(spec.step_order):
        acc += np.exp(2j * np.pi * (step * spec.delta_f_step * t
                                    + x * slot * spec.pulse_repetition))
    return acc / spec.num_pulses


def _two_tone_train_af(t, f_d, spec: WaveformSpec):
    """Closed-form |AF| for two-tone pulse trains, valid for |t| <= T."""
    t = np.asarray(t, dtype=float)
    f_d = np.asarray(f_d, dtype=float)
    big_t = spec.pulse_duration
    df = spec.pulse_bandwidth
    length = np.clip(big_t - np.abs(t), 0.0, None)
    tones = np.exp(2j * np.pi * spec.f1 * t) + np.exp(2j * np.pi * spec.f2 * t)
    mid = np.exp(1j * np.pi * (spec.f1 + spec.f2) * t)
    cross_up = np.exp(1j * np.pi * df * big_t)
    total = (
        tones * np.sinc(f_d * length) * _slot_sum(spec, t, f_d)
        + mid * cross_up * np.sinc((f_d + df) * length) * _slot_sum(spec, t, f_d + df)
        + mid / cross_up * np.sinc((f_d - df) * length) * _slot_sum(spec, t, f_d - df)
    )
    return length * np.abs(total)


def ambiguity_pttw_analytic(t, f_d, spec: WaveformSpec):
    """Closed-form |AF| of the single two-tone pulse (unnormalized; the peak
    at the origin is 2T plus a small cross term).  Zero outside |t| <= T."""
    if spec.family != "PTTW":
        raise ValueError(f"expected a PTTW spec, got {spec.family}")
    return _two_tone_train_af(t, f_d, spec)


def ambiguity_ttsfw_analytic(t, f_d, spec: WaveformSpec):
    """Closed-form |AF| of the two-tone stepped train within |t| <= T.

    Pointwise equal to the single-pulse form at N=1; for N > 1 the slot sums
    retain only every Nth two-tone correlation lobe on the zero-Doppler cut.
    """
    if spec.family != "TTSFW":
        raise ValueError(f"expected a TTSFW spec, got {spec.family}")
    return _two_tone_train_af(t, f_d, spec)


def ambiguity_sfw_analytic(t, f_d, spec: WaveformSpec):
    """Closed-form |AF| of the single-tone stepped train within |t| <= T:
    (T-|t|) sinc(f_D (T-|t|)) times the slot sum."""
    if spec.family != "SFW":
        raise ValueError(f"expected an SFW spec, got {spec.family}")
    t = np.asarray(t, dtype=float)
    f_d = np.asarray(f_d, dtype=float)
    length = np.clip(spec.pulse_duration - np.abs(t), 0.0, None)
    return length * np.abs(np.sinc(f_d * length) * _slot_sum(spec, t, f_d))


_ANALYTIC = {
    "PTTW": ambiguity_pttw_analytic,
    "SFW": ambiguity_sfw_analytic,
    "TTSFW": ambiguity_ttsfw_analytic,
}


def ambiguity_analytic(spec: WaveformSpec, delay_axis,
                       doppler_axis) -> AmbiguitySurface:
    """Closed-form surface on a grid, peak-normalized like the numeric one."""
    if spec.family not in _ANALYTIC:
        raise ValueError(f"no closed-form ambiguity for family {spec.family}")
    delay_axis = np.asarray(delay_axis, dtype=float)
    doppler_axis = np.asarray(doppler_axis, dtype=float)
    if delay_axis.size == 0 or doppler_axis.size == 0:
        raise ValueError("empty delay or Doppler grid")
    tt, ff = np.meshgrid(delay_axis, doppler_axis)
    mag = _ANALYTIC[spec.family](tt, ff, spec)
    peak = mag.max()
    if peak > 0:
        mag = mag / peak
    return AmbiguitySurface(delay_axis, doppler_axis, mag, source="analytic")


class NotchEntry(NamedTuple):
    delay_s: float
    status: str        # "retained" or "notched"
    magnitude: float   # zero-Doppler |AF| relative to the t=0 peak
    verified: bool     # notched entries: magnitude < 0.1 x nearest retained


def notch_report(spec: WaveformSpec, max_lobe: int | None = None) -> list[NotchEntry]:
    """Classify the two-tone correlation lobes of a stepped train.

    The underlying two-tone pulse correlates with lobes at every k/df; the
    N-pulse train retains those with k % N == 0 and notches the rest.  Each
    entry carries the analytic zero-Doppler magnitude (relative to the main
    peak) and, for notched lobes, whether it verifies below 0.1 of the
    nearest retained neighbor.
    """
    if spec.family != "TTSFW":
        raise ValueError(f"expected a TTSFW spec, got {spec.family}")
    n = spec.num_pulses
    if max_lobe is None:
        max_lobe = n
    df = spec.pulse_bandwidth
    delays = np.arange(max_lobe + 1) / df
    if delays[-1] > spec.pulse_duration:
        raise ValueError("lobe range extends beyond the pulse support")
    mags = ambiguity_ttsfw_analytic(delays, np.zeros_like(delays), spec)
    peak = float(ambiguity_ttsfw_analytic(0.0, 0.0, spec))
    mags = mags / peak
    entries = []
    for k in range(max_lobe + 1):
        retained = (k % n) == 0
        if retained:
            verified = True
        else:
            neighbors = [j for j in ((k // n) * n, (k // n + 1) * n) if j <= max_lobe]
            ref = max(mags[j] for j in neighbors) if neighbors else 1.0
            verified = bool(mags[k] < 0.1 * ref)
        entries.append(NotchEntry(
            delay_s=float(delays[k]),
            status="retained" if retained else "notched",
            magnitude=float(mags[k]),
            verified=verified,
        ))
    return entries
