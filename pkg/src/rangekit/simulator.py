"""Simulated propagation and multi-node ranging scenarios.

The channel applies a fractional-sample delay (64-tap windowed-sinc
interpolation, so sub-sample truth delays are representable), a path-loss
amplitude with exponent 2 (one-way / actively repeated) or 4 (passive
reflection), an optional retransmit gain and Doppler ramp, and complex white
Gaussian noise scaled so the during-pulse SNR at the receiver matches the
configured pre-processing value.

Scenario helpers compose the channel into the experiments of interest: a
slave ranging off a passive reflector or an active repeater, several pairs
transmitting simultaneously with distinct step orders (the co-channel
waveforms are summed at each receiver), and Monte Carlo sweeps of delay
variance against the closed-form bounds.

All randomness is counter-seeded from (master_seed, grid point, trial, leg)
so runs are reproducible and trials can be evaluated in any order.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.signal import fftconvolve
from scipy.special import i0 as bessel_i0

from . import bounds
from .estimator import (
    ObservationMatrix,
    RangingEstimate,
    average_peaks,
    calibrate,
    estimate_snr_eigen,
    interpolate_peak,
    matched_filter,
)
from .waveforms import ComplexSignal, WaveformSpec, generate

_DELAY_TAPS = 64
_KAISER_BETA = 8.6


@dataclass(frozen=True)
class LinkModel:
    """One channel traversal.

    ``true_range`` is the total path length the signal travels before
    reaching the receiver (set it to 2x the node separation for a passive
    round trip).  ``snr_pre_db`` is the during-pulse SNR at the receiver
    input; ``math.inf`` disables noise injection.
    """

    true_range: float
    path_loss_exponent: int = 2
    retransmit_gain: float = 0.0   # dB
    snr_pre_db: float = math.inf
    doppler_hz: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.true_range < 0:
            raise ValueError("true_range must be >= 0")
        if self.path_loss_exponent not in (2, 4):
            raise ValueError("path_loss_exponent must be 2 (repeated) or 4 (reflected)")

    @property
    def delay_s(self) -> float:
        return self.true_range / SPEED_OF_LIGHT


def _fractional_delay_kernel(mu: float, taps: int = _DELAY_TAPS) -> np.ndarray:
    """Kaiser-windowed sinc interpolator delaying by mu in (0, 1) samples."""
    half = taps // 2
    k = np.arange(taps) - (half - 1)
    x = k - mu
    window = bessel_i0(_KAISER_BETA * np.sqrt(np.clip(1.0 - (x / half) ** 2, 0.0, None)))
    return np.sinc(x) * window / bessel_i0(_KAISER_BETA)


def apply_channel(signal: ComplexSignal, link: LinkModel,
                  reference_range: float = 1.0,
                  buffer_duration: float | None = None) -> ComplexSignal:
    """Deterministic part of the channel: delay, path loss, gain, Doppler.

    Amplitude scales as (reference_range / true_range)^(exponent/2) (power
    falls as range^-exponent), so the channel is unity-gain at the reference
    range; zero range also passes amplitude 1.  The output buffer grows to
    hold the delayed signal unless ``buffer_duration`` pins it, in which
    case a delay that no longer fits raises.
    """
    fs = signal.sample_rate
    delay_samples = link.delay_s * fs
    d_int = int(math.floor(delay_samples))
    mu = delay_samples - d_int
    fractional = mu > 1e-12
    margin = _DELAY_TAPS if fractional else 0
    needed = len(signal) + d_int + margin
    if buffer_duration is None:
        n_out = needed
    else:
        n_out = round(buffer_duration * fs)
        if n_out < needed:
            raise ValueError(
                f"delay {link.delay_s:g} s exceeds the simulation buffer "
                f"({buffer_duration:g} s for a {signal.duration:g} s signal)"
            )
    if link.true_range > 0:
        amplitude = (reference_range / link.true_range) ** (link.path_loss_exponent / 2)
    else:
        amplitude = 1.0
    amplitude *= 10.0 ** (link.retransmit_gain / 20.0)

    out = np.zeros(n_out, dtype=np.complex128)
    if fractional:
        kernel = _fractional_delay_kernel(mu)
        shifted = fftconvolve(signal.samples, kernel)
        offset = d_int - (_DELAY_TAPS // 2 - 1)  # kernel group delay
    else:
        shifted = signal.samples
        offset = d_int
    src_lo = max(0, -offset)
    dst_lo = max(0, offset)
    count = min(len(shifted) - src_lo, n_out - dst_lo)
    if count > 0:
        out[dst_lo:dst_lo + count] = shifted[src_lo:src_lo + count]
    out *= amplitude
    if link.doppler_hz != 0.0:
        t = signal.t0 + np.arange(n_out) / fs
        out *= np.exp(2j * np.pi * link.doppler_hz * t)
    return ComplexSignal(out, fs, signal.t0)


def _during_pulse_power(samples: np.ndarray) -> float:
    """Mean power over samples carrying signal (pulse on-times).

    On/off classification is by magnitude against 1e-3 of the peak, which
    sits above interpolation ringing but below the pulse envelope except at
    isolated beat nulls.
    """
    mags = np.abs(samples)
    peak = mags.max()
    if peak == 0.0:
        raise ValueError("cannot scale noise against an all-zero signal")
    mask = mags > 1e-3 * peak
    return float(np.mean(mags[mask] ** 2))


def _noise(rng: np.random.Generator, variance: float, n: int) -> np.ndarray:
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


def propagate(signal: ComplexSignal, link: LinkModel,
              reference_range: float = 1.0,
              buffer_duration: float | None = None,
              rng: np.random.Generator | None = None) -> ComplexSignal:
    """Full channel: ``apply_channel`` plus receiver noise at the link SNR."""
    clean = apply_channel(signal, link, reference_range, buffer_duration)
    if math.isinf(link.snr_pre_db):
        return clean
    if rng is None:
        rng = np.random.default_rng(link.rng_seed)
    p_on = _during_pulse_power(clean.samples)
    variance = p_on * 10.0 ** (-link.snr_pre_db / 10.0)
    noisy = clean.samples + _noise(rng, variance, len(clean.samples))
    return ComplexSignal(noisy, clean.sample_rate, clean.t0)


# ---------------------------------------------------------------------------
# Node scenarios

ROLES = ("master", "slave", "repeater")


@dataclass(frozen=True)
class Node:
    id: str
    role: str
    position: float  # meters along the range line

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}")


@dataclass(frozen=True)
class RangingPair:
    slave_id: str
    target_id: str
    waveform: WaveformSpec


@dataclass(frozen=True)
class NodeScenario:
    """Nodes plus the simultaneously active ranging pairs.

    All pairs must target the same master/repeater node and carry distinct
    step orders so their waveforms stay quasi-orthogonal on the air.
    """

    nodes: tuple[Node, ...]
    pairs: tuple[RangingPair, ...]
    sample_rate: float
    carrier_metadata: dict | None = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "pairs", tuple(self.pairs))
        ids = [n.id for n in self.nodes]
        if len(ids) != len(set(ids)):
            raise ValueError("node ids must be unique")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        by_id = {n.id: n for n in self.nodes}
        targets = set()
        orders = []
        for p in self.pairs:
            if p.slave_id not in by_id or by_id[p.slave_id].role != "slave":
                raise ValueError(f"pair slave {p.slave_id!r} is not a slave node")
            if p.target_id not in by_id or by_id[p.target_id].role not in ("master", "repeater"):
                raise ValueError(f"pair target {p.target_id!r} is not a master/repeater")
            targets.add(p.target_id)
            orders.append(p.waveform.step_order)
        if len(targets) > 1:
            raise ValueError("all pairs must range against the same target node")
        if len(orders) != len(set(orders)):
            raise ValueError("simultaneously active pairs must use distinct step orders")

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise ValueError(f"unknown node {node_id!r}")

    def to_dict(self) -> dict:
        return {
            "sample_rate": self.sample_rate,
            "nodes": [
                {"id": n.id, "role": n.role, "position": n.position}
                for n in self.nodes
            ],
            "pairs": [
                {
                    "slave": p.slave_id,
                    "target": p.target_id,
                    "waveform": p.waveform.to_dict(),
                }
                for p in self.pairs
            ],
            "carrier_metadata": self.carrier_metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NodeScenario":
        known = {"sample_rate", "nodes", "pairs", "carrier_metadata"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown scenario fields: {sorted(unknown)}")
        return cls(
            nodes=tuple(
                Node(n["id"], n["role"], float(n["position"])) for n in d["nodes"]
            ),
            pairs=tuple(
                RangingPair(
                    p["slave"], p["target"],
                    WaveformSpec.from_dict(p["waveform"]),
                )
                for p in d["pairs"]
            ),
            sample_rate=float(d["sample_rate"]),
            carrier_metadata=d.get("carrier_metadata"),
        )


def _seed_key(master_seed) -> tuple[int, ...]:
    if isinstance(master_seed, (tuple, list)):
        return tuple(int(v) for v in master_seed)
    return (int(master_seed),)


def _round_trip_clean(wave: ComplexSignal, up_range: float, down_range: float,
                      target_role: str, repeater_gain_db: float,
                      buffer_duration: float) -> tuple[ComplexSignal, ...]:
    """Noiseless out-and-back propagation.

    Repeater: two exponent-2 legs, gain on the downlink; returns
    (leg1, leg2) so per-leg noise can be composed by the caller.
    Reflector: one exponent-4 traversal of the total path; returns (total,).
    """
    if target_role == "repeater":
        leg1 = apply_channel(wave, LinkModel(up_range, 2))
        leg2 = apply_channel(
            leg1, LinkModel(down_range, 2, retransmit_gain=repeater_gain_db),
            buffer_duration=buffer_duration)
        return leg1, leg2
    total = apply_channel(
        wave, LinkModel(up_range + down_range, 4),
        buffer_duration=buffer_duration)
    return (total,)


def run_pair_session(scenario: NodeScenario, pair_id: int, trials: int,
                     snr_pre_db: float = 30.0, repeater_gain_db: float = 30.0,
                     interpolation_factor: int = 8, master_seed=0,
                     include_interference: bool = True) -> list[RangingEstimate]:
    """Repeated ranging captures for one pair of a scenario.

    Each trial propagates the pair's waveform out to the target and back,
    sums the other active pairs' returns arriving at the same receiver, adds
    receiver noise, and runs the matched-filter chain.  For a repeater
    target, independent noise is injected per leg (each at SNR + 3 dB so the
    composed link meets ``snr_pre_db`` at the receiver); the leg-1 noise is
    re-propagated through the downlink like the signal it accompanies.
    """
    if not 0 <= pair_id < len(scenario.pairs):
        raise ValueError(f"pair_id {pair_id} out of range")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    pair = scenario.pairs[pair_id]
    slave = scenario.node(pair.slave_id)
    target = scenario.node(pair.target_id)
    fs = scenario.sample_rate
    wave = generate(pair.waveform, fs)
    d_own = abs(slave.position - target.position)

    paths = [2.0 * d_own]
    others = []
    if include_interference:
        for q, other in enumerate(scenario.pairs):
            if q == pair_id:
                continue
            d_up = abs(scenario.node(other.slave_id).position - target.position)
            others.append((other, d_up))
            paths.append(d_up + d_own)
    longest = max(p.waveform.total_duration for p in scenario.pairs) \
        if others else wave.duration
    buffer_duration = longest + max(paths) / SPEED_OF_LIGHT \
        + 3 * _DELAY_TAPS / fs

    legs = _round_trip_clean(wave, d_own, d_own, target.role,
                             repeater_gain_db, buffer_duration)
    clean_own = legs[-1]

    interference = np.zeros(len(clean_own), dtype=np.complex128)
    for other, d_up in others:
        other_wave = generate(other.waveform, fs)
        cross = _round_trip_clean(other_wave, d_up, d_own, target.role,
                                  repeater_gain_db, buffer_duration)[-1]
        interference += cross.samples

    two_leg = target.role == "repeater" and math.isfinite(snr_pre_db)
    if two_leg:
        snr_leg_db = snr_pre_db + 10.0 * math.log10(2.0)
        var1 = _during_pulse_power(legs[0].samples) * 10.0 ** (-snr_leg_db / 10.0)
        var2 = _during_pulse_power(legs[1].samples) * 10.0 ** (-snr_leg_db / 10.0)
        downlink = LinkModel(d_own, 2, retransmit_gain=repeater_gain_db)
    elif math.isfinite(snr_pre_db):
        var_single = _during_pulse_power(clean_own.samples) \
            * 10.0 ** (-snr_pre_db / 10.0)

    peaks = []
    captures = []  # first few kept for the eigen-SNR readback
    n_keep = min(trials, 16)
    base = _seed_key(master_seed)
    for trial in range(trials):
        received = clean_own.samples + interference
        if two_leg:
            rng1 = np.random.default_rng(base + (pair_id, trial, 0))
            rng2 = np.random.default_rng(base + (pair_id, trial, 1))
            noise1 = ComplexSignal(_noise(rng1, var1, len(legs[0])), fs)
            received = received \
                + apply_channel(noise1, downlink,
                                buffer_duration=buffer_duration).samples \
                + _noise(rng2, var2, len(clean_own))
        elif math.isfinite(snr_pre_db):
            rng = np.random.default_rng(base + (pair_id, trial, 0))
            received = received + _noise(rng, var_single, len(clean_own))
        capture = ComplexSignal(received, fs, clean_own.t0)
        corr = matched_filter(capture, wave)
        peaks.append(interpolate_peak(corr, factor=interpolation_factor))
        if len(captures) < n_keep:
            captures.append(capture.samples)

    snr_est = None
    if trials >= 2:
        on_mask = np.abs(clean_own.samples) > 1e-3 * np.abs(clean_own.samples).max()
        n_obs = min(int(on_mask.sum()), 4096)
        if n_obs >= n_keep:
            obs = ObservationMatrix.from_captures(
                [cap[on_mask][:n_obs] for cap in captures])
            snr_est = estimate_snr_eigen(obs).snr_db

    return [
        RangingEstimate.from_delay(
            peak.delay_s, peak.magnitude, interpolation_factor,
            link_type="two_way", snr_db_est=snr_est)
        for peak in peaks
    ]


# ---------------------------------------------------------------------------
# Three-node demo: two slaves ranging off one repeater across a position sweep

@dataclass(frozen=True)
class ThreeNodeConfig:
    start_range_m: float = 4.572        # 15 ft
    step_m: float = 0.254               # 10 in toward the slaves per position
    num_positions: int = 10
    trials_per_position: int = 100
    snr_pre_db: float = 30.0
    repeater_gain_db: float = 30.0
    sample_rate: float = 25e6
    f1: float = 1e6
    pulse_bandwidth: float = 4e6
    delta_f_step: float = 1e6
    num_pulses: int = 4
    pulse_duration: float = 250e-6
    interpolation_factor: int = 8
    master_seed: int = 0


@dataclass(frozen=True)
class PositionRow:
    position_m: float       # true range for this position
    range_true_m: float
    range_est_m: float      # calibrated mean over trials
    range_raw_m: float      # uncalibrated mean
    variance_m2: float


@dataclass(frozen=True)
class ThreeNodeResult:
    config: ThreeNodeConfig
    slave_ids: tuple[str, ...]
    offsets_m: tuple[float, ...]             # calibration offset per slave
    rows: tuple[tuple[PositionRow, ...], ...]  # rows[slave][position]


def _three_node_scenario(cfg: ThreeNodeConfig, range_m: float) -> NodeScenario:
    def spec(order):
        return WaveformSpec(
            family="TTSFW",
            f1=cfg.f1,
            f2=cfg.f1 + cfg.pulse_bandwidth,
            pulse_duration=cfg.pulse_duration,
            delta_f_step=cfg.delta_f_step,
            num_pulses=cfg.num_pulses,
            step_order=order,
        )
    ascending = tuple(range(cfg.num_pulses))
    descending = tuple(reversed(ascending))
    return NodeScenario(
        nodes=(
            Node("slave-0", "slave", 0.0),
            Node("slave-1", "slave", 0.0),
            Node("repeater", "repeater", range_m),
        ),
        pairs=(
            RangingPair("slave-0", "repeater", spec(ascending)),
            RangingPair("slave-1", "repeater", spec(descending)),
        ),
        sample_rate=cfg.sample_rate,
        carrier_metadata={"uplink_hz": 5.00e9, "downlink_hz": 5.25e9},
    )


def run_three_node_demo(cfg: ThreeNodeConfig | None = None) -> ThreeNodeResult:
    """Sweep the repeater across the configured positions, ranging both
    slaves simultaneously at each one, then calibrate out each slave's
    static offset against the known truth."""
    if cfg is None:
        cfg = ThreeNodeConfig()
    truths = [cfg.start_range_m - i * cfg.step_m for i in range(cfg.num_positions)]
    if min(truths) <= 0:
        raise ValueError("position sweep crosses zero range")
    per_slave_means: list[list[float]] = [[], []]
    per_slave_vars: list[list[float]] = [[], []]
    for i, r in enumerate(truths):
        scenario = _three_node_scenario(cfg, r)
        for s in range(2):
            session = run_pair_session(
                scenario, s, cfg.trials_per_position,
                snr_pre_db=cfg.snr_pre_db,
                repeater_gain_db=cfg.repeater_gain_db,
                interpolation_factor=cfg.interpolation_factor,
                master_seed=(cfg.master_seed, i),
            )
            ranges = [e.range_m for e in session]
            avg = average_peaks(ranges)
            per_slave_means[s].append(avg.delay_s)
            per_slave_vars[s].append(avg.variance_s2)
    offsets = [calibrate(per_slave_means[s], truths) for s in range(2)]
    rows = tuple(
        tuple(
            PositionRow(
                position_m=truths[i],
                range_true_m=truths[i],
                range_est_m=per_slave_means[s][i] - offsets[s],
                range_raw_m=per_slave_means[s][i],
                variance_m2=per_slave_vars[s][i],
            )
            for i in range(cfg.num_positions)
        )
        for s in range(2)
    )
    return ThreeNodeResult(
        config=cfg,
        slave_ids=("slave-0", "slave-1"),
        offsets_m=tuple(offsets),
        rows=rows,
    )


# ---------------------------------------------------------------------------
# Monte Carlo variance sweeps against the closed-form bounds

MC_AXES = ("num_pulses", "snr")


@dataclass(frozen=True)
class MonteCarloConfig:
    """Defaults mirror the desk-scale variance studies: 4 MHz total band,
    500 us waveform at 50% duty, 25 MHz sampling, 30 dB pre-processing SNR,
    stepped waveform parameters tied to the band by ``scalability_params``."""

    total_bw: float = 4e6
    duration: float = 500e-6
    sample_rate: float = 25e6
    snr_pre_db: float = 30.0
    num_pulses: int = 4
    true_range_m: float = 485.0
    interpolation_factor: int = 8
    search_window_s: float | None = None  # default 0.45 / pulse bandwidth


@dataclass(frozen=True)
class MonteCarloResult:
    axis: str
    grid: tuple[float, ...]
    trials: int
    variance_s2: tuple[float, ...]
    rmse_s: tuple[float, ...]
    crlb_s2: tuple[float, ...]       # bound at post-processing SNR
    crlb_pre_s2: tuple[float, ...]   # bound at pre-processing SNR
    master_seed: int
    degenerate: bool                 # trials < 2: variance is NaN
    config: dict


def _mc_point(cfg: MonteCarloConfig, num_pulses: int, snr_pre_db: float,
              trials: int, master_seed: int, grid_index: int):
    delta_f_step, delta_f_pulse = bounds.scalability_params(cfg.total_bw, num_pulses)
    t_rep = cfg.duration / num_pulses
    t_on = t_rep / 2.0
    f1 = -cfg.total_bw / 2.0
    spec = WaveformSpec(
        family="TTSFW",
        f1=f1,
        f2=f1 + delta_f_pulse,
        pulse_duration=t_on,
        delta_f_step=delta_f_step,
        num_pulses=num_pulses,
        pulse_repetition=t_rep,
    )
    fs = cfg.sample_rate
    wave = generate(spec, fs)
    link = LinkModel(cfg.true_range_m, path_loss_exponent=2)
    clean = apply_channel(wave, link)
    tau_true = link.delay_s
    p_on = _during_pulse_power(clean.samples)
    variance = p_on * 10.0 ** (-snr_pre_db / 10.0)
    window = cfg.search_window_s
    if window is None:
        window = 0.45 / delta_f_pulse

    estimates = []
    for trial in range(trials):
        rng = np.random.default_rng((master_seed, grid_index, trial))
        received = ComplexSignal(
            clean.samples + _noise(rng, variance, len(clean.samples)), fs)
        corr = matched_filter(received, wave)
        peak = interpolate_peak(corr, factor=cfg.interpolation_factor,
                                search=(tau_true - window, tau_true + window))
        estimates.append(peak.delay_s)

    avg = average_peaks(estimates)
    rmse = math.sqrt(math.fsum((e - tau_true) ** 2 for e in estimates) / trials)
    noise_spec = bounds.NoiseSpec(
        snr_db=snr_pre_db,
        noise_bandwidth=fs,
        integration_time=num_pulses * t_on,
    )
    report = bounds.crlb_ttsfw(num_pulses, delta_f_pulse, delta_f_step, noise_spec)
    pre_variance = report.variance_bound * report.snr_linear \
        / 10.0 ** (snr_pre_db / 10.0)
    return avg.variance_s2, rmse, report.variance_bound, pre_variance


def monte_carlo_variance(axis: str, grid: Sequence[float],
                         base_config: MonteCarloConfig | None = None,
                         trials: int = 1000,
                         master_seed: int = 0) -> MonteCarloResult:
    """Delay variance of the full estimator chain across a parameter grid.

    ``axis`` selects what the grid varies: the pulse count (waveform
    parameters re-derived from the total band each point) or the
    pre-processing SNR at fixed pulse count.  Every point reports the sample
    variance and RMSE of ``trials`` seeded captures next to the closed-form
    bound at post- and pre-processing SNR.

    The peak search is confined to within a half correlation lobe of the
    true delay, so the reported variance measures local (small-error)
    accuracy; outside that regime the single-pulse waveform's ambiguity
    lobes would dominate any estimator.
    """
    if axis not in MC_AXES:
        raise ValueError(f"axis must be one of {MC_AXES}")
    grid = tuple(float(g) for g in grid)
    if not grid:
        raise ValueError("empty grid")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cfg = base_config or MonteCarloConfig()

    def point(i: int):
        if axis == "num_pulses":
            return _mc_point(cfg, int(grid[i]), cfg.snr_pre_db,
                             trials, master_seed, i)
        return _mc_point(cfg, cfg.num_pulses, grid[i], trials, master_seed, i)

    max_workers = int(os.environ.get("RANGING_THREADS", "1"))
    if max_workers > 1 and len(grid) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(point, range(len(grid))))
    else:
        results = [point(i) for i in range(len(grid))]

    variances, rmses, crlbs, crlbs_pre = zip(*results)
    return MonteCarloResult(
        axis=axis,
        grid=grid,
        trials=trials,
        variance_s2=tuple(variances),
        rmse_s=tuple(rmses),
        crlb_s2=tuple(crlbs),
        crlb_pre_s2=tuple(crlbs_pre),
        master_seed=master_seed,
        degenerate=trials < 2,
        config={
            "total_bw": cfg.total_bw,
            "duration": cfg.duration,
            "sample_rate": cfg.sample_rate,
            "snr_pre_db": cfg.snr_pre_db,
            "num_pulses": cfg.num_pulses,
            "true_range_m": cfg.true_range_m,
            "interpolation_factor": cfg.interpolation_factor,
            "search_window_s": cfg.search_window_s,
        },
    )
