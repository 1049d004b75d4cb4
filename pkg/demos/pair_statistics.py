"""
Opposite-polarity pairs in noise events
=======================================

A noise-only pixel fires when the photoreceptor noise wanders more than a
threshold away from the stored reference. Each event re-samples the reference,
so the next crossing tends to go back the other way. This script measures how
strongly consecutive events alternate polarity as the threshold grows.
"""
import math

import numpy as np

from dvsnoise import PixelParams, class_medians, isi_by_class, pair_transitions, simulate_pixel

f3db = 100.0
tau = 1 / (2 * math.pi * f3db)

# %%
# Instant reset (refractory period 1% of the noise correlation time) and
# symmetric thresholds, given in units of the noise standard deviation.
for theta in (0.8, 1.5, 2.5, 3.0):
    p = PixelParams(theta_on=theta, theta_off=theta, tau_refr=0.01 * tau, f3db=f3db, sigma_noise=1.0)
    ev = simulate_pixel(p, duration=100.0, seed=1)
    ps = pair_transitions(ev)
    med = class_medians(ev)
    print(f"theta={theta:.1f} sigma  rate={len(ev) / 100:7.1f} Hz  opposite pairs={ps.opposite_fraction:.3f}")
    for cls, m in med.items():
        print(f"    {cls[0].name:>3}->{cls[1].name:<3} median ISI {m:9.0f} us")

# %%
# ISI histograms, 4 bins per decade, at the 2.5 sigma point.
p = PixelParams(2.5, 2.5, 0.01 * tau, f3db, 1.0)
for h in isi_by_class(simulate_pixel(p, 100.0, seed=1), bins_per_decade=4):
    peak = int(np.argmax(h.counts))
    print(f"{h.name:8s} n={h.counts.sum():6d}  modal bin [{h.bin_edges[peak]:.0f}, {h.bin_edges[peak + 1]:.0f}) us")
