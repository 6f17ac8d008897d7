"""Command-line interface: outputs, round trips, exit codes, idempotence."""

import json

import pytest

from rangekit.cli import main


def run(args):
    return main([str(a) for a in args])


class TestExitCodes:
    def test_no_arguments_usage(self, capsys):
        assert run([]) == 2

    def test_unknown_flag(self, tmp_path):
        assert run(["crlb", "--bogus", "1", "--out", tmp_path / "x.csv"]) == 2

    def test_computation_error_is_one(self, tmp_path, capsys):
        # capacity exceeded inside the planner
        code = run(["plan", "--bw", "4e6", "--pairs", "50", "--pulse", "2e-6",
                    "--out", tmp_path / "p.json"])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_success_is_zero(self, tmp_path):
        assert run(["plan", "--bw", "4e6", "--pairs", "2", "--pulse", "2e-6",
                    "--out", tmp_path / "p.json"]) == 0


class TestWaveformAndEstimate:
    def test_round_trip_loopback(self, tmp_path):
        base = tmp_path / "wf"
        assert run(["waveform", "--family", "TTSFW", "--pulses", "4",
                    "--out", base]) == 0
        est_path = tmp_path / "est.json"
        assert run(["estimate", "--iq", base.with_suffix(".csv"),
                    "--waveform", base.with_suffix(".json"),
                    "--out", est_path]) == 0
        est = json.loads(est_path.read_text())
        assert est["delay_s"] == pytest.approx(0.0, abs=1e-12)
        assert est["range_m"] == pytest.approx(0.0, abs=1e-6)
        assert est["link_type"] == "two_way"

    def test_waveform_spec_fields(self, tmp_path):
        base = tmp_path / "wf"
        run(["waveform", "--family", "TTSFW", "--pulses", "2", "--pair", "1",
             "--out", base])
        spec = json.loads(base.with_suffix(".json").read_text())
        assert spec["step_order"] == [1, 0]
        assert spec["num_pulses"] == 2


class TestCrlb:
    def test_row_count_matches_grid(self, tmp_path):
        out = tmp_path / "crlb.csv"
        assert run(["crlb", "--bw", "4e6", "--n", "1..8", "--snr", "30",
                    "--out", out]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ("N,delta_f_step_hz,delta_f_pulse_hz,snr_db,"
                            "msbw,variance_s2,std_s,range_std_m")
        assert len(lines) == 9

    def test_comma_grid(self, tmp_path):
        out = tmp_path / "crlb.csv"
        run(["crlb", "--bw", "4e6", "--n", "1,2,4", "--out", out])
        assert len(out.read_text().splitlines()) == 4


class TestPlan:
    def test_plan_json(self, tmp_path):
        out = tmp_path / "plan.json"
        run(["plan", "--bw", "4e6", "--pairs", "4", "--pulse", "2e-6",
             "--out", out])
        plan = json.loads(out.read_text())
        assert plan["num_bands"] == 8
        assert plan["channels"] == [[0, 0, 4], [1, 1, 5], [2, 2, 6], [3, 3, 7]]


class TestAmbiguity:
    def test_csv_grid(self, tmp_path):
        out = tmp_path / "amb.csv"
        assert run(["ambiguity", "--family", "PTTW", "--pulses", "1",
                    "--df-step", "0", "--pulse-duration", "50e-6",
                    "--points", "21", "--out", out]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "delay,doppler,magnitude"
        assert len(lines) == 1 + 21 * 21

    def test_json_format(self, tmp_path):
        out = tmp_path / "amb.json"
        run(["ambiguity", "--family", "PTTW", "--pulses", "1",
             "--df-step", "0", "--pulse-duration", "50e-6",
             "--points", "11", "--source", "analytic",
             "--format", "json", "--out", out])
        surface = json.loads(out.read_text())
        assert len(surface["magnitude"]) == 11
        assert len(surface["magnitude"][0]) == 11
        assert surface["source"] == "analytic"
        assert max(max(row) for row in surface["magnitude"]) == pytest.approx(1.0)


class TestSimulateAndMonteCarlo:
    def test_scenario_session(self, tmp_path):
        scenario = {
            "sample_rate": 25e6,
            "nodes": [
                {"id": "s0", "role": "slave", "position": 0.0},
                {"id": "rep", "role": "repeater", "position": 4.572},
            ],
            "pairs": [{
                "slave": "s0", "target": "rep",
                "waveform": {
                    "family": "TTSFW", "f1": 1e6, "f2": 5e6,
                    "delta_f_step": 1e6, "num_pulses": 4,
                    "pulse_duration": 250e-6, "pulse_repetition": 500e-6,
                    "step_order": [0, 1, 2, 3], "amplitude_norm": 0.5,
                },
            }],
        }
        spath = tmp_path / "scenario.json"
        spath.write_text(json.dumps(scenario))
        out = tmp_path / "session.csv"
        assert run(["simulate", "--scenario", spath, "--pair", "0",
                    "--trials", "3", "--out", out]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 4
        range_m = float(lines[1].split(",")[2])
        assert range_m == pytest.approx(4.572, abs=0.01)

    def test_three_node_rows(self, tmp_path):
        out = tmp_path / "sweep.csv"
        assert run(["simulate", "--three-node", "--positions", "3",
                    "--trials", "2", "--out", out]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 1 + 2 * 3  # two slaves, three positions

    def test_montecarlo_columns(self, tmp_path):
        out = tmp_path / "mc.csv"
        assert run(["montecarlo", "--grid", "1,2", "--trials", "10",
                    "--out", out]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "x,variance_sim,variance_crlb"
        assert len(lines) == 3

    def test_idempotent_outputs(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            run(["montecarlo", "--grid", "2", "--trials", "6", "--seed", "5",
                 "--out", out])
        assert a.read_bytes() == b.read_bytes()


class TestConfigOverride:
    def test_config_overrides_flags(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"pairs": 2}))
        out = tmp_path / "plan.json"
        assert run(["plan", "--bw", "4e6", "--pairs", "4", "--pulse", "2e-6",
                    "--config", cfg, "--out", out]) == 0
        plan = json.loads(out.read_text())
        assert len(plan["channels"]) == 2

    def test_unknown_config_field_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"nonsense": 1}))
        out = tmp_path / "plan.json"
        code = run(["plan", "--bw", "4e6", "--pairs", "2", "--pulse", "2e-6",
                    "--config", cfg, "--out", out])
        assert code == 1
        assert "unknown config fields" in capsys.readouterr().err


class TestFigures:
    def test_manifest(self, tmp_path):
        out = tmp_path / "figs"
        assert run(["figures", "--trials", "6", "--out", out]) == 0
        names = sorted(p.name for p in out.iterdir())
        assert names == sorted([
            "ttsfw_two_pulse_waveform.csv",
            "matched_filter_two_pulse.csv",
            "matched_filter_four_pulse.csv",
            "variance_vs_pulses.csv",
            "variance_vs_snr.csv",
            "reflector_sweep.csv",
            "repeater_sweep_three_node.csv",
        ])
