"""FDM channel planning: timing floors, capacity, band assignment."""

import numpy as np
import pytest
from scipy.constants import c

from rangekit import (
    CapacityError,
    build_plan,
    min_pulse_time,
    min_range,
    node_capacity,
)


class TestMinPulseTime:
    def test_half_duplex_floor(self):
        assert min_pulse_time(4e6, "half") == pytest.approx(0.5e-6)

    def test_full_duplex_no_floor(self):
        assert min_pulse_time(4e6, "full", max_range=0.0) == 0.0

    def test_full_duplex_transit_floor(self):
        assert min_pulse_time(4e6, "full", max_range=300.0) == pytest.approx(
            1e-6, rel=1e-3)

    def test_min_range_two_way(self):
        assert min_range(4e6) == pytest.approx(c * 0.5e-6 / 2, rel=1e-12)

    def test_bad_duplex(self):
        with pytest.raises(ValueError):
            min_pulse_time(4e6, "simplex")


class TestNodeCapacity:
    def test_reference_value(self):
        assert node_capacity(4e6, 1e-3) == 2000

    def test_single_connection(self):
        assert node_capacity(2e3, 1e-3) == 1

    def test_linearity_in_update_interval(self):
        assert node_capacity(4e6, 2e-3) == 2 * node_capacity(4e6, 1e-3)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            node_capacity(0.0, 1e-3)


class TestBuildPlan:
    def test_eight_band_assignment(self):
        plan = build_plan(total_bw=4e6, num_pairs=4, pulse_duration=2e-6)
        assert plan.num_bands == 8
        assert [tuple(ch) for ch in plan.channels] == [
            (0, 0, 4), (1, 1, 5), (2, 2, 6), (3, 3, 7),
        ]
        separations = {hi - lo for _, lo, hi in plan.channels}
        assert separations == {4}

    def test_single_pair_gets_half_band_separation(self):
        plan = build_plan(total_bw=4e6, num_pairs=1, pulse_duration=2e-6)
        assert plan.channels == ((0, 0, 4),)
        assert plan.tone_separation == pytest.approx(2e6)

    def test_capacity_error_names_bands_and_pairs(self):
        with pytest.raises(CapacityError, match="5 pairs.*10 bands.*8"):
            build_plan(total_bw=4e6, num_pairs=5, pulse_duration=2e-6)

    def test_odd_band_count_rounds_down(self):
        plan = build_plan(total_bw=4.5e6, num_pairs=4, pulse_duration=2e-6)
        assert plan.num_bands == 8  # floor(9) rounded to even

    def test_default_update_interval_is_two_way_dwell(self):
        plan = build_plan(total_bw=4e6, num_pairs=1, pulse_duration=2e-6)
        assert plan.update_interval == pytest.approx(4e-6)

    def test_capacity_consistency_with_capacity_formula(self):
        # succeeding at the band limit matches the node-capacity budget
        bw, t = 4e6, 2e-6
        m = int(bw * t)
        plan = build_plan(bw, m // 2, t)
        assert plan.node_capacity == node_capacity(bw, 2 * t)
        with pytest.raises(CapacityError):
            build_plan(bw, m // 2 + 1, t)

    def test_randomized_invariants_thousand_cases(self):
        rng = np.random.default_rng(2024)
        checked = 0
        while checked < 1000:
            bw = 10 ** rng.uniform(5, 8)             # 100 kHz .. 100 MHz
            pulse = 10 ** rng.uniform(-6.5, -3)      # ~0.3 us .. 1 ms
            m = int(bw * pulse)
            m -= m % 2
            if m < 2:
                continue
            pairs = int(rng.integers(1, m // 2 + 1))
            plan = build_plan(bw, pairs, pulse)
            used = [b for _, lo, hi in plan.channels for b in (lo, hi)]
            assert len(used) == len(set(used)), "band assigned twice"
            assert all(0 <= b < plan.num_bands for b in used)
            seps = {hi - lo for _, lo, hi in plan.channels}
            assert len(seps) == 1, "tone separation not constant"
            assert plan.num_bands * plan.band_width <= bw * (1 + 1e-9)
            checked += 1
        assert checked == 1000
