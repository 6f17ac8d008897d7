"""Frequency-division channel planning for simultaneous node pairs.

Walks through the timing floors, the node-capacity estimate, and a band
assignment where every channel keeps the same tone separation (so no pair
is biased relative to another).
"""

from rangekit import build_plan, min_pulse_time, min_range, node_capacity

BW = 4e6

print(f"total bandwidth: {BW/1e6:g} MHz")
t_min = min_pulse_time(BW, "half")
print(f"half-duplex pulse floor: {t_min*1e6:g} us "
      f"(minimum two-way range {min_range(BW):.1f} m)")
print(f"full-duplex floor for a 300 m array: "
      f"{min_pulse_time(BW, 'full', max_range=300.0)*1e6:.3f} us")

for dt in (1e-3, 10e-3, 100e-3):
    print(f"nodes connectable per {dt*1e3:g} ms update: "
          f"{node_capacity(BW, dt)}")

print("\nband assignment for 4 pairs at 2 us pulses:")
plan = build_plan(BW, num_pairs=4, pulse_duration=2e-6)
print(f"  {plan.num_bands} bands of {plan.band_width/1e6:g} MHz, "
      f"tone separation {plan.tone_separation/1e6:g} MHz for every channel")
for pair_id, lo, hi in plan.channels:
    lo_mhz = lo * plan.band_width / 1e6
    hi_mhz = hi * plan.band_width / 1e6
    print(f"  pair {pair_id}: bands ({lo}, {hi}) -> tones near "
          f"{lo_mhz:.1f} and {hi_mhz:.1f} MHz above the band origin")
