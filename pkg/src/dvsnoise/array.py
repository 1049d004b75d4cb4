"""Pixel arrays with threshold mismatch, and bias-current to parameter mapping."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from contextlib import ExitStack
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import EVENT_DTYPE, PixelParams, simulate_pixel

__all__ = [
    "ArrayConfig",
    "BiasPoint",
    "EventCapExceeded",
    "bias_to_refractory",
    "bias_to_thresholds",
    "derive_seed",
    "make_pixel_params",
    "merge_events",
    "pixel_noise_seed",
    "simulate_array",
]

DEFAULT_MAX_EVENTS = 50_000_000

# stream tags mixed into per-pixel seeds
_MISMATCH_STREAM = 0
_NOISE_STREAM = 1


class EventCapExceeded(MemoryError):
    def __init__(self, cap: int, produced: int):
        super().__init__(f"event count {produced} exceeds the configured cap of {cap} events")
        self.cap = cap
        self.produced = produced


@dataclass(frozen=True)
class ArrayConfig:
    width: int
    height: int
    base: PixelParams
    mismatch_sigma_thresh: float = 0.0
    master_seed: int = 0
    max_events: int = DEFAULT_MAX_EVENTS

    def __post_init__(self):
        for name in ("width", "height"):
            v = getattr(self, name)
            if int(v) != v or v < 1 or v > 0xFFFF:
                raise ValueError(f"{name} must be an integer in [1, 65535], got {v!r}")
        if not (math.isfinite(self.mismatch_sigma_thresh) and self.mismatch_sigma_thresh >= 0):
            raise ValueError(f"mismatch_sigma_thresh must be finite and >= 0, got {self.mismatch_sigma_thresh!r}")
        if int(self.master_seed) != self.master_seed or self.master_seed < 0:
            raise ValueError(f"master_seed must be a non-negative integer, got {self.master_seed!r}")
        if self.max_events < 0:
            raise ValueError(f"max_events must be >= 0, got {self.max_events!r}")


@dataclass(frozen=True)
class BiasPoint:
    """Pixel bias currents (A) plus the constants that map them to model parameters."""

    i_on: float
    i_off: float
    i_d: float
    i_refr: float
    c_reset: float
    v_swing: float
    k_thresh: float

    def __post_init__(self):
        for name in ("i_on", "i_off", "i_d", "i_refr", "c_reset", "v_swing", "k_thresh"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")


def bias_to_thresholds(bp: BiasPoint) -> tuple[float, float]:
    """ON/OFF contrast thresholds ``k*ln(I_on/I_d)`` and ``k*ln(I_d/I_off)``."""
    if not bp.i_on > bp.i_d:
        raise ValueError(f"i_on ({bp.i_on:g} A) must exceed i_d ({bp.i_d:g} A) for a positive ON threshold")
    if not bp.i_off < bp.i_d:
        raise ValueError(f"i_off ({bp.i_off:g} A) must be below i_d ({bp.i_d:g} A) for a positive OFF threshold")
    return bp.k_thresh * math.log(bp.i_on / bp.i_d), bp.k_thresh * math.log(bp.i_d / bp.i_off)


def bias_to_refractory(bp: BiasPoint) -> float:
    """Refractory period in seconds, assuming linear charging of the reset node."""
    return bp.c_reset * bp.v_swing / bp.i_refr


def derive_seed(*keys: int) -> int:
    """Hash a tuple of non-negative integers into a 64-bit seed."""
    return int(np.random.SeedSequence(list(keys)).generate_state(1, np.uint64)[0])


def pixel_noise_seed(master_seed: int, x: int, y: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([master_seed, x, y, _NOISE_STREAM])


def _check_bounds(cfg: ArrayConfig, x: int, y: int) -> None:
    if not (0 <= x < cfg.width and 0 <= y < cfg.height):
        raise IndexError(f"pixel ({x}, {y}) outside {cfg.width}x{cfg.height} array")


def make_pixel_params(cfg: ArrayConfig, x: int, y: int) -> PixelParams:
    """Mismatched parameters for pixel ``(x, y)``.

    Both thresholds get independent lognormal factors with median 1 and log-std
    ``cfg.mismatch_sigma_thresh``, drawn from a stream keyed on
    ``(master_seed, x, y)``.
    """
    _check_bounds(cfg, x, y)
    if cfg.mismatch_sigma_thresh == 0:
        return cfg.base
    rng = np.random.default_rng(np.random.SeedSequence([cfg.master_seed, x, y, _MISMATCH_STREAM]))
    z_on, z_off = rng.standard_normal(2)
    s = cfg.mismatch_sigma_thresh
    return cfg.base.replace(
        theta_on=cfg.base.theta_on * math.exp(s * z_on),
        theta_off=cfg.base.theta_off * math.exp(s * z_off),
    )


def merge_events(parts: list[np.ndarray]) -> np.ndarray:
    """Concatenate event arrays and sort by ``(t, y, x, polarity)``, ON first on ties."""
    if not parts:
        return np.empty(0, dtype=EVENT_DTYPE)
    ev = np.concatenate(parts)
    order = np.lexsort((1 - ev["polarity"].astype(np.int16), ev["x"], ev["y"], ev["t_us"]))
    return ev[order]


def simulate_array(cfg: ArrayConfig, duration: float, workers: Optional[int] = None) -> np.ndarray:
    """Simulate every pixel of the array and merge into one sorted stream.

    Pixels are independent, so ``workers`` only changes scheduling, never the
    output.
    """
    coords = [(x, y) for y in range(cfg.height) for x in range(cfg.width)]

    def run(xy):
        x, y = xy
        return simulate_pixel(make_pixel_params(cfg, x, y), duration, pixel_noise_seed(cfg.master_seed, x, y), x, y)

    parts: list[np.ndarray] = []
    produced = 0
    with ExitStack() as stack:
        if workers is not None and workers > 1:
            # pool.map yields in submission order regardless of completion order
            results = stack.enter_context(ThreadPoolExecutor(max_workers=workers)).map(run, coords)
        else:
            results = map(run, coords)
        for ev in results:
            produced += len(ev)
            if produced > cfg.max_events:
                raise EventCapExceeded(cfg.max_events, produced)
            parts.append(ev)
    return merge_events(parts)
