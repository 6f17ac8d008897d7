"""Gallery of the ranging waveforms at complex baseband.

Generates one example of each family -- the two-tone pulse, the stepped
single-tone train, the two-tone stepped train, and the chirp baseline --
and plots the time-domain envelope next to the spectrum so the spectral
sparsity and the per-pulse stepping are visible.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rangekit import WaveformSpec, generate, generate_lfm

FS = 25e6
OUT = __import__("pathlib").Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

specs = {
    "two-tone pulse": WaveformSpec("PTTW", 1e6, 5e6, 250e-6),
    "stepped train": WaveformSpec("SFW", 1e6, 2e6, 125e-6,
                                  delta_f_step=1e6, num_pulses=4),
    "two-tone stepped train": WaveformSpec("TTSFW", 1e6, 5e6, 250e-6,
                                           delta_f_step=1e6, num_pulses=4),
}

fig, axes = plt.subplots(4, 2, figsize=(10, 11))

for row, (label, spec) in enumerate(specs.items()):
    sig = generate(spec, FS)
    t = sig.times() * 1e3
    axes[row, 0].plot(t, sig.samples.real, lw=0.3)
    axes[row, 0].set_title(f"{label}: I(t)")
    axes[row, 0].set_xlabel("time [ms]")
    freqs = np.fft.fftshift(np.fft.fftfreq(len(sig), 1 / FS)) / 1e6
    spec_db = 20 * np.log10(np.abs(np.fft.fftshift(np.fft.fft(sig.samples))) + 1e-12)
    axes[row, 1].plot(freqs, spec_db - spec_db.max(), lw=0.5)
    axes[row, 1].set_xlim(-2, 10)
    axes[row, 1].set_ylim(-80, 5)
    axes[row, 1].set_title(f"{label}: spectrum")
    axes[row, 1].set_xlabel("frequency [MHz]")
    axes[row, 1].set_ylabel("dB")
    print(f"{label}: {len(sig)} samples, duration {sig.duration*1e3:.3f} ms, "
          f"energy {sig.energy:.3e}, tone set (MHz) "
          f"{[f'{f/1e6:g}' for f in spec.tone_set()]}")

chirp = generate_lfm(4e6, 1e-3, FS)
axes[3, 0].plot(chirp.times() * 1e3, chirp.samples.real, lw=0.1)
axes[3, 0].set_title("chirp baseline: I(t)")
axes[3, 0].set_xlabel("time [ms]")
freqs = np.fft.fftshift(np.fft.fftfreq(len(chirp), 1 / FS)) / 1e6
spec_db = 20 * np.log10(np.abs(np.fft.fftshift(np.fft.fft(chirp.samples))) + 1e-12)
axes[3, 1].plot(freqs, spec_db - spec_db.max(), lw=0.5)
axes[3, 1].set_xlim(-6, 6)
axes[3, 1].set_ylim(-80, 5)
axes[3, 1].set_title("chirp baseline: spectrum (flat across the band)")
axes[3, 1].set_xlabel("frequency [MHz]")

fig.tight_layout()
fig.savefig(OUT / "waveform_gallery.png", dpi=120)
print(f"saved {OUT / 'waveform_gallery.png'}")
