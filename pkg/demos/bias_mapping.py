"""
From bias currents to pixel parameters
======================================

Thresholds scale with the ratio of the ON/OFF comparator currents to the
differencing-amplifier current, and the refractory period is the time the
refractory current needs to recharge the reset node.
"""
import math

from dvsnoise import ArrayConfig, BiasPoint, PixelParams, bias_to_refractory, bias_to_thresholds, simulate_array

bias = BiasPoint(
    i_on=4e-9, i_off=0.25e-9, i_d=1e-9,   # A
    i_refr=2e-12,                          # A
    c_reset=20e-15, v_swing=0.5,           # F, V
    k_thresh=0.5,                          # scale on ln(current ratio)
)
theta_on, theta_off = bias_to_thresholds(bias)
tau_refr = bias_to_refractory(bias)
print(f"theta_on={theta_on:.3f}  theta_off={theta_off:.3f}  tau_refr={tau_refr * 1e3:.2f} ms")

# %%
# Simulate a small array at that bias with 0.1 threshold mismatch.
p = PixelParams(theta_on, theta_off, tau_refr, f3db=100.0, sigma_noise=0.25)
ev = simulate_array(ArrayConfig(16, 16, p, mismatch_sigma_thresh=0.1, master_seed=5), duration=5.0)
on = int((ev["polarity"] == 1).sum())
print(f"{len(ev)} events, {on} ON / {len(ev) - on} OFF, {len(ev) / (256 * 5.0):.2f} Hz per pixel")
