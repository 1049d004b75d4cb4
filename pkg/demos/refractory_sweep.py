"""
Refractory period sweep
=======================

Holding the pixel in reset for longer than the noise correlation time lets the
noise forget the excursion that caused the event, so the return event is no
longer guaranteed. Rates drop and ON/OFF pairs decouple.
"""
import math

import numpy as np

from dvsnoise import ArrayConfig, PixelParams, SweepSpec, emit_sweep_csv, run_refractory_sweep

f3db = 100.0
tau = 1 / (2 * math.pi * f3db)

base = PixelParams(theta_on=2.5, theta_off=2.5, tau_refr=0.01 * tau, f3db=f3db, sigma_noise=1.0)
spec = SweepSpec(
    "refractory",
    values=np.logspace(-2, 1, 7) * tau,
    base_cfg=ArrayConfig(8, 8, base, master_seed=21),
    duration=20.0,
)
result = run_refractory_sweep(spec)

print(" tau_refr/tau   rate Hz   opposite")
for p in result:
    print(f"{p.value / tau:11.3f}  {p.rate_total_hz:8.2f}   {p.opposite_fraction:.3f}")

# %%
# Same table as CSV, the format the command line ``sweep`` writes.
emit_sweep_csv(result, "refractory_sweep.csv")
