"""Complex-baseband generation of the ranging waveform family.

Four waveform types are supported:

* ``PTTW``  -- a single rectangular pulse carrying two simultaneous tones
  separated by the pulse bandwidth.  Optimal delay accuracy, but the
  matched-filter output repeats every 1/bandwidth (highly ambiguous).
* ``SFW``   -- a train of single-tone pulses whose carrier steps by a fixed
  increment each pulse.  Ambiguity lobes are pushed out to 1/step.
* ``TTSFW`` -- a train of two-tone pulses, both tones stepped together.
  Combines the two-tone accuracy with the stepped-frequency disambiguation,
  and distinct step orders give quasi-orthogonal waveforms for simultaneous
  node pairs.
* ``LFM``   -- a constant-amplitude linear chirp, kept as the classical
  full-band baseline.

All generators are phase coherent from a common t=0 reference (the tone
exponent uses absolute time, not per-pulse time), produce exactly zero
samples outside pulse on-times, and scale pulse amplitude by 1/sqrt(N) so
total energy is independent of the pulse count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

FAMILIES = ("PTTW", "SFW", "TTSFW", "LFM")


@dataclass(frozen=True)
class WaveformSpec:
    """Parametric description of one ranging waveform.

    Attributes:
        family: one of PTTW, SFW, TTSFW, LFM.
        f1: lower tone offset at baseband, Hz (chirp start for LFM).
        f2: upper tone offset, Hz.  Pulse bandwidth is f2 - f1.
        delta_f_step: per-pulse frequency step, Hz.
        num_pulses: pulse count N >= 1.
        pulse_duration: on-time per pulse T, seconds.
        pulse_repetition: pulse repetition interval T_r >= T; defaults to
            2*T (50% duty cycle).
        step_order: permutation of {0..N-1} assigning frequency steps to
            pulse time slots; defaults to the identity (ascending steps).
        amplitude_norm: per-tone amplitude; defaults to 1/sqrt(N).
    """

    family: str
    f1: float
    f2: float
    pulse_duration: float
    delta_f_step: float = 0.0
    num_pulses: int = 1
    pulse_repetition: float | None = None
    step_order: tuple[int, ...] | None = None
    amplitude_norm: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown waveform family {self.family!r}")
        if not self.f2 > self.f1:
            raise ValueError("f2 must exceed f1 (pulse bandwidth must be positive)")
        if self.num_pulses < 1:
            raise ValueError("num_pulses must be >= 1")
        if self.pulse_duration <= 0:
            raise ValueError("pulse_duration must be positive")
        if self.family == "PTTW" and (self.num_pulses != 1 or self.delta_f_step != 0.0):
            raise ValueError("PTTW requires num_pulses=1 and delta_f_step=0")
        if self.pulse_repetition is None:
            object.__setattr__(self, "pulse_repetition", 2.0 * self.pulse_duration)
        if self.pulse_repetition < self.pulse_duration:
            raise ValueError("pulse_repetition must be >= pulse_duration")
        if self.step_order is None:
            object.__setattr__(self, "step_order", tuple(range(self.num_pulses)))
        else:
            object.__setattr__(self, "step_order", tuple(int(k) for k in self.step_order))
        if sorted(self.step_order) != list(range(self.num_pulses)):
            raise ValueError("step_order must be a permutation of 0..num_pulses-1")
        if self.amplitude_norm is None:
            object.__setattr__(self, "amplitude_norm", 1.0 / math.sqrt(self.num_pulses))

    @property
    def pulse_bandwidth(self) -> float:
        """Tone separation within one pulse, Hz."""
        return self.f2 - self.f1

    @property
    def total_duration(self) -> float:
        """Full waveform duration N * T_r, seconds."""
        return self.num_pulses * self.pulse_repetition

    def tone_set(self) -> list[float]:
        """All tone frequencies the waveform occupies, Hz."""
        if self.family == "LFM":
            return [self.f1, self.f2]
        steps = range(self.num_pulses)
        if self.family == "SFW":
            return sorted(self.f1 + n * self.delta_f_step for n in steps)
        return sorted(
            f + n * self.delta_f_step for n in steps for f in (self.f1, self.f2)
        )

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "f1": self.f1,
            "f2": self.f2,
            "delta_f_step": self.delta_f_step,
            "num_pulses": self.num_pulses,
            "pulse_duration": self.pulse_duration,
            "pulse_repetition": self.pulse_repetition,
            "step_order": list(self.step_order),
            "amplitude_norm": self.amplitude_norm,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WaveformSpec":
        known = {
            "family", "f1", "f2", "delta_f_step", "num_pulses",
            "pulse_duration", "pulse_repetition", "step_order", "amplitude_norm",
        }
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown WaveformSpec fields: {sorted(unknown)}")
        d = dict(d)
        if d.get("step_order") is not None:
            d["step_order"] = tuple(d["step_order"])
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "WaveformSpec":
        return cls.from_dict(json.loads(text))


@dataclass(eq=False)
class ComplexSignal:
    """Sampled complex-baseband signal.

    Attributes:
        samples: complex amplitudes (dimensionless voltage).
        sample_rate: Hz.
        t0: time of the first sample, seconds.
    """

    samples: np.ndarray
    sample_rate: float
    t0: float = 0.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    @property
    def energy(self) -> float:
        """Signal energy sum(|s_k|^2) / sample_rate."""
        return float(np.sum(np.abs(self.samples) ** 2)) / self.sample_rate

    def times(self) -> np.ndarray:
        """Sample instants in seconds."""
        return self.t0 + np.arange(len(self.samples)) / self.sample_rate


def _check_rates(spec: WaveformSpec, sample_rate: float) -> None:
    if sample_rate <= 0:
        raise ValueError("sample_rate must be positive")
    max_tone = max(abs(f) for f in spec.tone_set())
    if max_tone > sample_rate / 2 * (1 + 1e-12):
        raise ValueError(
            f"tone at {max_tone:g} Hz exceeds the complex Nyquist limit "
            f"{sample_rate / 2:g} Hz (aliasing)"
        )
    if round(spec.pulse_duration * sample_rate) < 2:
        raise ValueError(
            "degenerate signal: pulse_duration * sample_rate must be >= 2"
        )


def _tone_pulse_train(spec: WaveformSpec, sample_rate: float,
                      tones_per_step) -> ComplexSignal:
    """Shared kernel: N gated pulses, each a coherent sum of tones.

    ``tones_per_step(m)`` returns the tone frequencies carried by frequency
    step m; the step occupying time slot n is spec.step_order[n].
    """
    _check_rates(spec, sample_rate)
    n_total = round(spec.total_duration * sample_rate)
    t = np.arange(n_total) / sample_rate
    out = np.zeros(n_total, dtype=np.complex128)
    n_on = round(spec.pulse_duration * sample_rate)
    for slot in range(spec.num_pulses):
        start = round(slot * spec.pulse_repetition * sample_rate)
        stop = min(start + n_on, n_total)
        tt = t[start:stop]
        for f in tones_per_step(spec.step_order[slot]):
            out[start:stop] += np.exp(2j * np.pi * f * tt)
    out *= spec.amplitude_norm
    return ComplexSignal(out, sample_rate, 0.0)


def generate_pttw(spec: WaveformSpec, sample_rate: float) -> ComplexSignal:
    """Single rectangular pulse carrying the two tones f1 and f2.

    Samples equal exp(j2*pi*f1*t) + exp(j2*pi*f2*t) on [0, T) and are zero
    elsewhere.
    """
    if spec.family != "PTTW":
        raise ValueError(f"expected a PTTW spec, got {spec.family}")
    return _tone_pulse_train(spec, sample_rate, lambda m: (spec.f1, spec.f2))


def generate_sfw(spec: WaveformSpec, sample_rate: float) -> ComplexSignal:
    """Stepped-frequency pulse train: pulse slot n carries the single tone
    f1 + step_order[n] * delta_f_step, scaled by 1/sqrt(N)."""
    if spec.family != "SFW":
        raise ValueError(f"expected an SFW spec, got {spec.family}")
    return _tone_pulse_train(
        spec, sample_rate, lambda m: (spec.f1 + m * spec.delta_f_step,)
    )


def generate_ttsfw(spec: WaveformSpec, sample_rate: float) -> ComplexSignal:
    """Two-tone stepped-frequency train: slot n carries the tone pair
    (f1 + s*df, f2 + s*df) with s = step_order[n], amplitude 1/sqrt(N)."""
    if spec.family != "TTSFW":
        raise ValueError(f"expected a TTSFW spec, got {spec.family}")
    return _tone_pulse_train(
        spec, sample_rate,
        lambda m: (spec.f1 + m * spec.delta_f_step, spec.f2 + m * spec.delta_f_step),
    )


def generate_lfm(bandwidth: float, duration: float,
                 sample_rate: float) -> ComplexSignal:
    """Constant-amplitude linear chirp sweeping [-BW/2, +BW/2) over T.

    Instantaneous frequency slope is bandwidth/duration.
    """
    if bandwidth <= 0 or duration <= 0:
        raise ValueError("bandwidth and duration must be positive")
    if bandwidth > sample_rate * (1 + 1e-12):
        raise ValueError("chirp bandwidth exceeds the sample rate")
    n = round(duration * sample_rate)
    if n < 2:
        raise ValueError("degenerate signal: duration * sample_rate must be >= 2")
    t = np.arange(n) / sample_rate
    phase = 2.0 * np.pi * (-0.5 * bandwidth * t + bandwidth / (2.0 * duration) * t ** 2)
    return ComplexSignal(np.exp(1j * phase), sample_rate, 0.0)


def generate(spec: WaveformSpec, sample_rate: float) -> ComplexSignal:
    """Dispatch on spec.family."""
    if spec.family == "PTTW":
        return generate_pttw(spec, sample_rate)
    if spec.family == "SFW":
        return generate_sfw(spec, sample_rate)
    if spec.family == "TTSFW":
        return generate_ttsfw(spec, sample_rate)
    return generate_lfm(spec.pulse_bandwidth, spec.pulse_duration, sample_rate)


def step_order_for_pair(num_pulses: int, pair_index: int) -> tuple[int, ...]:
    """Deterministic step-order permutation for node pair ``pair_index``.

    Cyclic shift of the identity order by pair_index, giving N distinct
    orders that reuse the same pulse set.  For N=2 this yields the
    ascending/descending pair used for two simultaneous nodes.
    """
    if num_pulses < 1:
        raise ValueError("num_pulses must be >= 1")
    if not 0 <= pair_index < num_pulses:
        raise ValueError(
            f"pair_index {pair_index} exceeds the {num_pulses} distinct "
            f"step orders available (capacity exceeded)"
        )
    return tuple((n + pair_index) % num_pulses for n in range(num_pulses))


# ---------------------------------------------------------------------------
# IQ CSV export: two columns (i, q) preceded by a metadata line so a capture
# file round-trips with its sample rate and time origin.

def write_signal_csv(signal: ComplexSignal, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# sample_rate={signal.sample_rate!r} t0={signal.t0!r}\n")
        fh.write("i,q\n")
        for s in signal.samples:
            fh.write(f"{s.real:.17g},{s.imag:.17g}\n")


def read_signal_csv(path) -> ComplexSignal:
    with open(path, "r") as fh:
        meta = fh.readline().strip()
        if not meta.startswith("#"):
            raise ValueError(f"{path}: missing metadata header line")
        fields = dict(item.split("=", 1) for item in meta[1:].split())
        header = fh.readline().strip()
        if header.lower() != "i,q":
            raise ValueError(f"{path}: expected 'i,q' column header, got {header!r}")
        rows = [line.split(",") for line in fh if line.strip()]
    data = np.array([[float(i), float(q)] for i, q in rows])
    samples = data[:, 0] + 1j * data[:, 1] if len(data) else np.zeros(0)
    return ComplexSignal(samples, float(fields["sample_rate"]), float(fields["t0"]))
