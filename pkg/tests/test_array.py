import math

import numpy as np
import pytest

from conftest import F3DB, TAU_NOISE
from dvsnoise import (
    ArrayConfig,
    BiasPoint,
    EventCapExceeded,
    PixelParams,
    bias_to_refractory,
    bias_to_thresholds,
    make_pixel_params,
    pixel_noise_seed,
    simulate_array,
    simulate_pixel,
)

E = math.e


def bias(**kw):
    base = dict(i_on=E * 1e-9, i_off=1e-9 / E, i_d=1e-9, i_refr=118e-12, c_reset=10e-15, v_swing=1.0, k_thresh=1.0)
    base.update(kw)
    return BiasPoint(**base)


class TestBiasMapping:
    def test_unit_log_ratio(self):
        assert bias_to_thresholds(bias()) == pytest.approx((1.0, 1.0), abs=1e-12)

    def test_ratio_030(self):
        on, off = bias_to_thresholds(bias(i_on=1e-9 * math.exp(0.3)))
        assert (on, off) == pytest.approx((0.3, 1.0), abs=1e-12)
        assert on / off == pytest.approx(0.30, abs=1e-12)

    def test_half_k(self):
        on, off = bias_to_thresholds(bias(i_on=2e-9, i_off=0.5e-9, k_thresh=0.5))
        expected = 0.5 * math.log(2)
        assert expected == pytest.approx(0.3466, abs=5e-5)
        assert on == pytest.approx(expected, rel=1e-12) and off == pytest.approx(expected, rel=1e-12)
        # independent route: log of a product
        assert on == pytest.approx(0.5 * (math.log(2e-9) - math.log(1e-9)), rel=1e-12)

    def test_ordering_errors_name_the_pair(self):
        with pytest.raises(ValueError, match="i_on.*i_d"):
            bias_to_thresholds(bias(i_on=0.5e-9))
        with pytest.raises(ValueError, match="i_off.*i_d"):
            bias_to_thresholds(bias(i_off=2e-9))

    def test_non_positive_rejected(self):
        with pytest.raises(ValueError):
            bias(i_refr=0.0)

    def test_refractory_from_sweep_endpoints(self):
        # 10 fF * 1 V / I
        assert bias_to_refractory(bias(i_refr=118e-12)) == pytest.approx(84.746e-6, rel=1e-4)
        assert bias_to_refractory(bias(i_refr=8.7e-9)) == pytest.approx(1.1494e-6, rel=1e-4)

    def test_refractory_inverse_current(self):
        assert bias_to_refractory(bias(i_refr=236e-12)) == bias_to_refractory(bias(i_refr=118e-12)) / 2


class TestPixelParams:
    def cfg(self, sigma=0.2, seed=5, w=64, h=64):
        base = PixelParams(0.8, 0.8, 0.0, F3DB, 1.0)
        return ArrayConfig(w, h, base, sigma, seed)

    def test_no_mismatch(self):
        cfg = self.cfg(sigma=0.0)
        assert all(make_pixel_params(cfg, x, y) == cfg.base for x in range(4) for y in range(4))

    def test_deterministic(self):
        cfg = self.cfg()
        assert make_pixel_params(cfg, 3, 7) == make_pixel_params(cfg, 3, 7)
        assert make_pixel_params(cfg, 3, 7) != make_pixel_params(cfg, 7, 3)

    def test_only_thresholds_vary(self):
        cfg = self.cfg()
        p = make_pixel_params(cfg, 1, 2)
        assert (p.tau_refr, p.f3db, p.sigma_noise, p.dt) == (0.0, F3DB, 1.0, cfg.base.dt)

    def test_out_of_bounds(self):
        cfg = self.cfg(w=4, h=4)
        for x, y in [(4, 0), (0, 4), (-1, 0)]:
            with pytest.raises(IndexError):
                make_pixel_params(cfg, x, y)

    def test_log_std_and_independence(self):
        cfg = self.cfg()
        ps = [make_pixel_params(cfg, x, y) for y in range(64) for x in range(64)]
        lon = np.log([p.theta_on / 0.8 for p in ps])
        loff = np.log([p.theta_off / 0.8 for p in ps])
        assert lon.std(ddof=1) == pytest.approx(0.2, abs=0.01)
        assert loff.std(ddof=1) == pytest.approx(0.2, abs=0.01)
        assert abs(np.median(lon)) < 0.02
        # correlation of independent draws: |r| < 3/sqrt(n)
        assert abs(np.corrcoef(lon, loff)[0, 1]) < 3 / math.sqrt(len(ps))
        assert min(p.theta_on for p in ps) > 0


class TestSimulateArray:
    def base(self, sigma_noise=1.0):
        return PixelParams(0.8, 0.8, 0.01 * TAU_NOISE, F3DB, sigma_noise)

    def test_single_pixel_reduction(self):
        cfg = ArrayConfig(1, 1, self.base(), 0.1, 77)
        ev = simulate_array(cfg, 1.0)
        ref = simulate_pixel(make_pixel_params(cfg, 0, 0), 1.0, pixel_noise_seed(77, 0, 0))
        assert len(ev) > 0 and ev.tobytes() == ref.tobytes()

    def test_silent_array(self):
        assert len(simulate_array(ArrayConfig(8, 8, self.base(0.0)), 1.0)) == 0

    def test_sorted_with_tie_order(self):
        ev = simulate_array(ArrayConfig(6, 5, self.base(), 0.2, 1), 0.5)
        key = list(zip(ev["t_us"].tolist(), ev["y"].tolist(), ev["x"].tolist(), (1 - ev["polarity"]).tolist()))
        assert key == sorted(key)
        assert set(zip(ev["x"].tolist(), ev["y"].tolist())) == {(x, y) for x in range(6) for y in range(5)}

    def test_parallel_equals_serial(self):
        cfg = ArrayConfig(32, 32, self.base(), 0.2, 3)
        serial = simulate_array(cfg, 0.1)
        parallel = simulate_array(cfg, 0.1, workers=4)
        assert serial.tobytes() == parallel.tobytes()

    def test_event_cap(self):
        cfg = ArrayConfig(4, 4, self.base(), 0.0, 0, max_events=100)
        with pytest.raises(EventCapExceeded, match="100"):
            simulate_array(cfg, 1.0)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ArrayConfig(0, 4, self.base())
        with pytest.raises(ValueError):
            ArrayConfig(4, 4, self.base(), -0.1)
