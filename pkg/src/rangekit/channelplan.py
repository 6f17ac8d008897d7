"""Frequency-domain multiplexing plan for simultaneous node pairs.

The available band is split into m = floor(BW * T) bands of width 1/T (the
bandwidth one pulse of length T occupies).  Every node pair gets a channel
of two bands, one from the lower half and one from the upper half of the
band stack, so the tone separation is the same constant (m/2) * band_width
for every channel and no pair is biased relative to another.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import c as SPEED_OF_LIGHT

DUPLEX_MODES = ("half", "full")


class CapacityError(ValueError):
    """Requested more simultaneous pairs than the band can hold."""


@dataclass(frozen=True)
class ChannelPlan:
    """Band-to-channel assignment with constant tone separation.

    ``channels`` is a list of (pair_id, lower_band_index, upper_band_index);
    band k spans [k * band_width, (k+1) * band_width) above the band origin.
    """

    total_bw: float
    band_width: float
    num_bands: int
    channels: tuple[tuple[int, int, int], ...]
    update_interval: float
    node_capacity: int
    duplex: str

    def __post_init__(self):
        if self.duplex not in DUPLEX_MODES:
            raise ValueError(f"duplex must be one of {DUPLEX_MODES}")
        used = [b for _, lo, hi in self.channels for b in (lo, hi)]
        if any(not 0 <= b < self.num_bands for b in used):
            raise ValueError("band index outside [0, num_bands)")
        if len(used) != len(set(used)):
            raise ValueError("a band is assigned to two channels")
        separations = {hi - lo for _, lo, hi in self.channels}
        if len(separations) > 1:
            raise ValueError("tone separation differs between channels")
        if self.num_bands * self.band_width > self.total_bw * (1 + 1e-9):
            raise ValueError("bands exceed the total bandwidth")

    @property
    def tone_separation(self) -> float:
        """Constant tone separation of every channel, Hz."""
        if not self.channels:
            return 0.0
        _, lo, hi = self.channels[0]
        return (hi - lo) * self.band_width

    def to_dict(self) -> dict:
        return {
            "total_bw": self.total_bw,
            "band_width": self.band_width,
            "num_bands": self.num_bands,
            "channels": [list(ch) for ch in self.channels],
            "update_interval": self.update_interval,
            "node_capacity": self.node_capacity,
            "duplex": self.duplex,
        }


def min_pulse_time(total_bw: float, duplex: str = "half",
                   max_range: float = 0.0) -> float:
    """Floor on the pulse length, seconds.

    Half duplex: the bandwidth sets a minimum detectable delay of 2/BW,
    which lower-bounds the pulse.  Full duplex: no bandwidth floor remains;
    the pulse only has to cover the array transit time max_range/c.
    """
    if total_bw <= 0:
        raise ValueError("total_bw must be positive")
    if duplex not in DUPLEX_MODES:
        raise ValueError(f"duplex must be one of {DUPLEX_MODES}")
    if duplex == "half":
        return 2.0 / total_bw
    return max_range / SPEED_OF_LIGHT


def min_range(total_bw: float) -> float:
    """Minimum resolvable two-way range for a half-duplex system:
    c * T_min / 2 with T_min = 2/BW."""
    return SPEED_OF_LIGHT * min_pulse_time(total_bw, "half") / 2.0


def node_capacity(total_bw: float, update_interval: float) -> int:
    """Connectable node count within one update interval: floor(BW*dt/2).

    Each connection needs one of m = BW*T bands-per-pulse channels and a
    two-way dwell of 2T, so m connections complete every 2T and
    BW*dt/2 complete in dt.
    """
    if total_bw <= 0 or update_interval <= 0:
        raise ValueError("total_bw and update_interval must be positive")
    return math.floor(total_bw * update_interval / 2.0)


def build_plan(total_bw: float, num_pairs: int, pulse_duration: float,
               update_interval: float | None = None,
               duplex: str = "half") -> ChannelPlan:
    """Assign two bands to each of ``num_pairs`` channels.

    The band splits into m = floor(BW * T) bands of width 1/T (odd m leaves
    the top band unused).  Channel k gets bands (k, k + m/2), giving every
    channel the identical tone separation (m/2) / T.
    """
    if total_bw <= 0 or pulse_duration <= 0:
        raise ValueError("total_bw and pulse_duration must be positive")
    if num_pairs < 1:
        raise ValueError("num_pairs must be >= 1")
    band_width = 1.0 / pulse_duration
    m = math.floor(total_bw * pulse_duration)
    m -= m % 2  # unpaired top band stays unassigned
    if 2 * num_pairs > m:
        raise CapacityError(
            f"{num_pairs} pairs need {2 * num_pairs} bands but only {m} fit "
            f"in {total_bw:g} Hz at pulse duration {pulse_duration:g} s"
        )
    if update_interval is None:
        update_interval = 2.0 * pulse_duration  # one two-way dwell
    channels = tuple((k, k, k + m // 2) for k in range(num_pairs))
    return ChannelPlan(
        total_bw=total_bw,
        band_width=band_width,
        num_bands=m,
        channels=channels,
        update_interval=update_interval,
        node_capacity=node_capacity(total_bw, update_interval),
        duplex=duplex,
    )
