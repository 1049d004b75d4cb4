"""
ON/OFF threshold ratio sweep
============================

Lowering theta_on / theta_off changes which events a pixel emits. The sweep
can keep theta_off fixed (the default), keep theta_on fixed, or keep the sum
of both thresholds fixed, which is what changing only the comparator's
reference current does.
"""
import math

from dvsnoise import ArrayConfig, PixelParams, SweepSpec, run_threshold_ratio_sweep

f3db = 100.0
tau = 1 / (2 * math.pi * f3db)
base = PixelParams(theta_on=2.5, theta_off=2.5, tau_refr=0.01 * tau, f3db=f3db, sigma_noise=1.0)
cfg = ArrayConfig(8, 8, base, master_seed=31)

for hold in ("theta_off", "theta_on", "sum"):
    res = run_threshold_ratio_sweep(SweepSpec("threshold_ratio", (1.0, 0.6, 0.3), cfg, 20.0, hold=hold))
    print(f"hold={hold}")
    for p in res:
        print(
            f"  ratio={p.value:.1f}  rate={p.rate_total_hz:7.2f} Hz (on {p.rate_on_hz:6.2f}, off {p.rate_off_hz:6.2f})"
            f"  opposite={p.opposite_fraction:.3f}  ON->OFF median {p.isi_med_on_off_us:.0f} us"
        )
