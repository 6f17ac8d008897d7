"""Command-line front end.

Subcommands mirror the library: ``waveform`` (spec JSON + IQ CSV),
``ambiguity`` (surface CSV/JSON), ``crlb`` (bound sweep CSV), ``plan``
(channel plan JSON), ``estimate`` (capture -> ranging JSON), ``simulate``
(pair session or three-node sweep CSV), ``montecarlo`` (variance-vs-bound
CSV), and ``figures`` (all canned data series in one run).

Outputs are deterministic for a fixed seed: CSV uses '.' decimals, ','
separators, a header row, LF line endings, and 17 significant digits.
A JSON file passed via --config overrides the corresponding flags; unknown
config keys are rejected.  RANGING_THREADS caps internal parallelism.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import ambiguity as amb
from . import bounds, channelplan, simulator
from .estimator import (
    RangingEstimate,
    average_peaks,
    calibrate,
    interpolate_peak,
    matched_filter,
)
from .waveforms import (
    WaveformSpec,
    generate,
    read_signal_csv,
    step_order_for_pair,
    write_signal_csv,
)


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path, payload) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _parse_grid(text: str) -> list[float]:
    """Grid syntax: comma list ('1,2,4,8') or inclusive range ('1..8')."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return [float(v) for v in range(int(lo), int(hi) + 1)]
    return [float(v) for v in text.split(",") if v]


def _spec_from_args(args) -> WaveformSpec:
    if args.spec:
        return WaveformSpec.from_json(Path(args.spec).read_text())
    order = None
    if getattr(args, "pair", None) is not None:
        order = step_order_for_pair(args.pulses, args.pair)
    return WaveformSpec(
        family=args.family,
        f1=args.f1,
        f2=args.f2,
        pulse_duration=args.pulse_duration,
        delta_f_step=args.df_step,
        num_pulses=args.pulses,
        pulse_repetition=args.prt,
        step_order=order,
    )


def _add_spec_flags(parser, required: bool) -> None:
    parser.add_argument("--spec", help="waveform spec JSON (overrides the flags below)")
    parser.add_argument("--family", default="TTSFW",
                        choices=["PTTW", "SFW", "TTSFW", "LFM"])
    parser.add_argument("--f1", type=float, default=1e6, help="lower tone, Hz")
    parser.add_argument("--f2", type=float, default=5e6, help="upper tone, Hz")
    parser.add_argument("--df-step", type=float, default=1e6,
                        help="per-pulse frequency step, Hz")
    parser.add_argument("--pulses", type=int, default=4, help="pulse count N")
    parser.add_argument("--pulse-duration", type=float, default=250e-6,
                        help="pulse on-time, s")
    parser.add_argument("--prt", type=float, default=None,
                        help="pulse repetition interval, s (default 2x on-time)")
    parser.add_argument("--pair", type=int, default=None,
                        help="derive the step order for this pair index")
    _ = required


# ---------------------------------------------------------------------------
# Subcommand handlers

def _cmd_waveform(args) -> int:
    spec = _spec_from_args(args)
    signal = generate(spec, args.fs)
    out = Path(args.out)
    spec_path = out.with_suffix(".json")
    iq_path = out.with_suffix(".csv")
    spec_path.write_text(spec.to_json() + "\n")
    write_signal_csv(signal, iq_path)
    print(f"wrote {spec_path} and {iq_path} "
          f"({len(signal)} samples, {signal.energy:.6g} energy)")
    return 0


def _cmd_ambiguity(args) -> int:
    spec = _spec_from_args(args)
    if args.delay_span or args.doppler_span:
        points = args.points
        dspan = args.delay_span or spec.pulse_duration
        fspan = args.doppler_span or 2.0 / spec.pulse_duration
        delay_axis = np.linspace(-dspan, dspan, points)
        doppler_axis = np.linspace(-fspan, fspan, points)
    else:
        delay_axis, doppler_axis = amb.default_axes(spec, args.points)
    if args.source == "numeric":
        surface = amb.ambiguity_numeric(generate(spec, args.fs),
                                        delay_axis, doppler_axis)
    else:
        surface = amb.ambiguity_analytic(spec, delay_axis, doppler_axis)
    if args.format == "json":
        _write_json(args.out, {
            "delay_axis": list(surface.delay_axis),
            "doppler_axis": list(surface.doppler_axis),
            "magnitude": [list(row) for row in surface.magnitude],
            "source": surface.source,
        })
    else:
        rows = (
            (d, f, surface.magnitude[i, j])
            for i, f in enumerate(surface.doppler_axis)
            for j, d in enumerate(surface.delay_axis)
        )
        _write_csv(args.out, ["delay", "doppler", "magnitude"], rows)
    print(f"wrote {args.out} ({surface.source}, "
          f"{len(surface.doppler_axis)}x{len(surface.delay_axis)} grid)")
    return 0


def _cmd_crlb(args) -> int:
    grid = [int(n) for n in _parse_grid(args.n)]
    noise = bounds.NoiseSpec(
        snr_db=args.snr,
        noise_bandwidth=args.noise_bw,
        integration_time=args.integration,
    )
    rows = []
    for n in grid:
        dfs, dfp = bounds.scalability_params(args.bw, n)
        report = bounds.crlb_ttsfw(n, dfp, dfs, noise, link_type=args.link)
        rows.append((
            n, dfs, dfp, args.snr,
            report.mean_square_bandwidth,
            report.variance_bound,
            report.std_bound,
            report.range_std_bound,
        ))
    _write_csv(args.out, [
        "N", "delta_f_step_hz", "delta_f_pulse_hz", "snr_db",
        "msbw", "variance_s2", "std_s", "range_std_m",
    ], rows)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def _cmd_plan(args) -> int:
    plan = channelplan.build_plan(
        total_bw=args.bw,
        num_pairs=args.pairs,
        pulse_duration=args.pulse,
        update_interval=args.dt,
        duplex=args.duplex,
    )
    _write_json(args.out, plan.to_dict())
    print(f"wrote {args.out} ({plan.num_bands} bands, "
          f"{len(plan.channels)} channels, capacity {plan.node_capacity})")
    return 0


def _cmd_estimate(args) -> int:
    capture = read_signal_csv(args.iq)
    spec = WaveformSpec.from_json(Path(args.waveform).read_text())
    reference = generate(spec, capture.sample_rate)
    corr = matched_filter(capture, reference)
    peak = interpolate_peak(corr, factor=args.factor)
    estimate = RangingEstimate.from_delay(
        peak.delay_s, peak.magnitude, args.factor, link_type=args.link)
    _write_json(args.out, estimate.to_dict())
    print(f"wrote {args.out} (delay {estimate.delay_s:.4g} s, "
          f"range {estimate.range_m:.4g} m)")
    return 0


def _run_sweep(scenario_builder, truths, trials, snr, gain, factor, seed):
    """Position sweep for every pair of a scenario family; returns rows of
    (slave, position_m, range_true_m, range_raw_m, variance_m2)."""
    rows = []
    first = scenario_builder(truths[0])
    for pair_id in range(len(first.pairs)):
        means, variances = [], []
        for i, r in enumerate(truths):
            scenario = scenario_builder(r)
            session = simulator.run_pair_session(
                scenario, pair_id, trials, snr_pre_db=snr,
                repeater_gain_db=gain, interpolation_factor=factor,
                master_seed=(seed, i))
            ranges = [e.range_m for e in session]
            avg = average_peaks(ranges)
            means.append(avg.delay_s)
            variances.append(avg.variance_s2)
        offset = calibrate(means, truths)
        for i, r in enumerate(truths):
            rows.append((first.pairs[pair_id].slave_id, r, r,
                         means[i] - offset, means[i], variances[i]))
    return rows


def _cmd_simulate(args) -> int:
    if args.three_node:
        cfg = simulator.ThreeNodeConfig(
            num_positions=args.positions,
            trials_per_position=args.trials,
            snr_pre_db=args.snr,
            repeater_gain_db=args.gain,
            interpolation_factor=args.factor,
            master_seed=args.seed,
        )
        result = simulator.run_three_node_demo(cfg)
        rows = [
            (result.slave_ids[s], row.position_m, row.range_true_m,
             row.range_est_m, row.range_raw_m, row.variance_m2)
            for s in range(len(result.slave_ids))
            for row in result.rows[s]
        ]
        _write_csv(args.out, [
            "slave", "position_m", "range_true_m", "range_est_m",
            "range_raw_m", "variance_m2",
        ], rows)
        print(f"wrote {args.out} ({len(rows)} rows)")
        return 0
    if not args.scenario:
        raise ValueError("simulate needs --scenario (or --three-node)")
    scenario = simulator.NodeScenario.from_dict(
        json.loads(Path(args.scenario).read_text()))
    session = simulator.run_pair_session(
        scenario, args.pair, args.trials, snr_pre_db=args.snr,
        repeater_gain_db=args.gain, interpolation_factor=args.factor,
        master_seed=args.seed)
    rows = [
        (i, e.delay_s, e.range_m, e.peak_magnitude,
         "" if e.snr_db_est is None else e.snr_db_est)
        for i, e in enumerate(session)
    ]
    _write_csv(args.out, [
        "trial", "delay_s", "range_m", "peak_magnitude", "snr_db_est",
    ], rows)
    print(f"wrote {args.out} ({len(rows)} trials)")
    return 0


def _cmd_montecarlo(args) -> int:
    cfg = simulator.MonteCarloConfig(
        total_bw=args.bw,
        duration=args.duration,
        sample_rate=args.fs,
        snr_pre_db=args.snr,
        num_pulses=args.pulses,
    )
    result = simulator.monte_carlo_variance(
        args.axis, _parse_grid(args.grid), base_config=cfg,
        trials=args.trials, master_seed=args.seed)
    rows = zip(result.grid, result.variance_s2, result.crlb_s2)
    _write_csv(args.out, ["x", "variance_sim", "variance_crlb"], rows)
    print(f"wrote {args.out} ({len(result.grid)} grid points, "
          f"{result.trials} trials each)")
    return 0


def _cmd_figures(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    fs = 25e6
    seed = args.seed
    written = []

    # Two-pulse waveform, and matched-filter comparison against the
    # single-pulse two-tone waveform with the same pulse bandwidth.
    two_pulse = WaveformSpec("TTSFW", 1e6, 5e6, 250e-6,
                             delta_f_step=2e6, num_pulses=2)
    sig2 = generate(two_pulse, fs)
    path = outdir / "ttsfw_two_pulse_waveform.csv"
    write_signal_csv(sig2, path)
    written.append(path)

    def mf_comparison(ttsfw_spec, fname):
        pttw = WaveformSpec("PTTW", ttsfw_spec.f1, ttsfw_spec.f2,
                            ttsfw_spec.pulse_duration)
        sig_t = generate(ttsfw_spec, fs)
        sig_p = generate(pttw, fs)
        corr_t = matched_filter(sig_t, sig_t)
        corr_p = matched_filter(sig_p, sig_p)
        span = 2.0 * ttsfw_spec.num_pulses / ttsfw_spec.pulse_bandwidth
        lags_t = corr_t.times()
        lags_p = corr_p.times()
        mag_t = np.abs(corr_t.samples) / np.abs(corr_t.samples).max()
        mag_p = np.abs(corr_p.samples) / np.abs(corr_p.samples).max()
        keep = np.abs(lags_t) <= span
        rows = zip(lags_t[keep], np.interp(lags_t[keep], lags_p, mag_p),
                   mag_t[keep])
        path = outdir / fname
        _write_csv(path, ["lag_s", "pttw_mag", "ttsfw_mag"], rows)
        written.append(path)

    mf_comparison(two_pulse, "matched_filter_two_pulse.csv")
    mf_comparison(
        WaveformSpec("TTSFW", 1e6, 5e6, 250e-6, delta_f_step=1e6, num_pulses=4),
        "matched_filter_four_pulse.csv")

    res_n = simulator.monte_carlo_variance(
        "num_pulses", [1, 2, 4, 8], trials=args.trials, master_seed=seed)
    path = outdir / "variance_vs_pulses.csv"
    _write_csv(path, ["x", "variance_sim", "variance_crlb"],
               zip(res_n.grid, res_n.variance_s2, res_n.crlb_s2))
    written.append(path)

    res_s = simulator.monte_carlo_variance(
        "snr", [20, 25, 30, 35, 40], trials=args.trials, master_seed=seed)
    path = outdir / "variance_vs_snr.csv"
    _write_csv(path, ["x", "variance_sim", "variance_crlb"],
               zip(res_s.grid, res_s.variance_s2, res_s.crlb_s2))
    written.append(path)

    # Reflector sweep: two slaves ranging off a passive reflector.
    def reflector_scenario(r):
        def order(i):
            return step_order_for_pair(4, i)
        def spec(i):
            return WaveformSpec("TTSFW", 1e6, 5e6, 250e-6, delta_f_step=1e6,
                                num_pulses=4, step_order=order(i))
        return simulator.NodeScenario(
            nodes=(
                simulator.Node("slave-0", "slave", 0.0),
                simulator.Node("slave-1", "slave", 0.0),
                simulator.Node("reflector", "master", r),
            ),
            pairs=(
                simulator.RangingPair("slave-0", "reflector", spec(0)),
                simulator.RangingPair("slave-1", "reflector", spec(1)),
            ),
            sample_rate=fs,
        )

    truths = [4.572 - 0.254 * i for i in range(10)]
    sweep_trials = max(10, args.trials // 10)
    rows = _run_sweep(reflector_scenario, truths, sweep_trials,
                      30.0, 0.0, 8, seed)
    path = outdir / "reflector_sweep.csv"
    _write_csv(path, ["slave", "position_m", "range_true_m", "range_est_m",
                      "range_raw_m", "variance_m2"], rows)
    written.append(path)

    cfg = simulator.ThreeNodeConfig(trials_per_position=sweep_trials,
                                    master_seed=seed)
    result = simulator.run_three_node_demo(cfg)
    rows = [
        (result.slave_ids[s], row.position_m, row.range_true_m,
         row.range_est_m, row.range_raw_m, row.variance_m2)
        for s in range(len(result.slave_ids))
        for row in result.rows[s]
    ]
    path = outdir / "repeater_sweep_three_node.csv"
    _write_csv(path, ["slave", "position_m", "range_true_m", "range_est_m",
                      "range_raw_m", "variance_m2"], rows)
    written.append(path)

    for p in written:
        print(f"wrote {p}")
    return 0


# ---------------------------------------------------------------------------
# Parser assembly

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rangekit",
        description="Spectrally-sparse ranging waveform toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file overriding these flags")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True, help="output path")
        p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("waveform", help="emit a waveform spec and IQ samples")
    _add_spec_flags(p, required=False)
    p.add_argument("--fs", type=float, default=25e6)
    common(p)
    p.set_defaults(handler=_cmd_waveform)

    p = sub.add_parser("ambiguity", help="delay-Doppler ambiguity surface")
    _add_spec_flags(p, required=False)
    p.add_argument("--fs", type=float, default=25e6)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--delay-span", type=float, default=None)
    p.add_argument("--doppler-span", type=float, default=None)
    p.add_argument("--source", choices=["numeric", "analytic"], default="numeric")
    common(p)
    p.set_defaults(handler=_cmd_ambiguity)

    p = sub.add_parser("crlb", help="delay-variance bound sweep")
    p.add_argument("--bw", type=float, default=4e6, help="total bandwidth, Hz")
    p.add_argument("--n", default="1..8", help="pulse counts: '1..8' or '1,2,4'")
    p.add_argument("--snr", type=float, default=30.0, help="pre-processing SNR, dB")
    p.add_argument("--noise-bw", type=float, default=25e6)
    p.add_argument("--integration", type=float, default=250e-6)
    p.add_argument("--link", choices=["one_way", "two_way"], default="two_way")
    common(p)
    p.set_defaults(handler=_cmd_crlb)

    p = sub.add_parser("plan", help="FDM channel plan")
    p.add_argument("--bw", type=float, required=True)
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--pulse", type=float, required=True)
    p.add_argument("--dt", type=float, default=None, help="update interval, s")
    p.add_argument("--duplex", choices=["half", "full"], default="half")
    common(p)
    p.set_defaults(handler=_cmd_plan)

    p = sub.add_parser("estimate", help="range from an IQ capture")
    p.add_argument("--iq", required=True, help="capture CSV (i,q with header)")
    p.add_argument("--waveform", required=True, help="waveform spec JSON")
    p.add_argument("--factor", type=int, default=8)
    p.add_argument("--link", choices=["one_way", "two_way"], default="two_way")
    common(p)
    p.set_defaults(handler=_cmd_estimate)

    p = sub.add_parser("simulate", help="multi-node ranging simulation")
    p.add_argument("--scenario", help="scenario JSON")
    p.add_argument("--pair", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--snr", type=float, default=30.0)
    p.add_argument("--gain", type=float, default=30.0)
    p.add_argument("--factor", type=int, default=8)
    p.add_argument("--three-node", action="store_true",
                   help="run the canned two-slave/one-repeater sweep")
    p.add_argument("--positions", type=int, default=10)
    common(p)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("montecarlo", help="estimator variance vs bound")
    p.add_argument("--axis", choices=["num_pulses", "snr"], default="num_pulses")
    p.add_argument("--grid", default="1,2,4,8")
    p.add_argument("--trials", type=int, default=300)
    p.add_argument("--bw", type=float, default=4e6)
    p.add_argument("--duration", type=float, default=500e-6)
    p.add_argument("--fs", type=float, default=25e6)
    p.add_argument("--snr", type=float, default=30.0)
    p.add_argument("--pulses", type=int, default=4)
    common(p)
    p.set_defaults(handler=_cmd_montecarlo)

    p = sub.add_parser("figures", help="emit all canned data series")
    p.add_argument("--trials", type=int, default=120)
    common(p)
    p.set_defaults(handler=_cmd_figures)

    return parser


def _apply_config(args, parser_dests: set[str]) -> None:
    if not getattr(args, "config", None):
        return
    overrides = json.loads(Path(args.config).read_text())
    if not isinstance(overrides, dict):
        raise ValueError("--config must hold a JSON object")
    unknown = set(overrides) - parser_dests
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    for key, value in overrides.items():
        setattr(args, key, value)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    dests = {
        action.dest
        for action in parser._subparsers._group_actions[0]
        .choices[args.command]._actions
        if action.dest != "help"
    }
    try:
        _apply_config(args, dests)
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
