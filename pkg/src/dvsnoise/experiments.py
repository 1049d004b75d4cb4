"""Bias sweeps: refractory period and ON/OFF threshold ratio.

Each sweep point re-simulates the array with one parameter overridden and
reduces the event stream to the statistics collected in a sweep table.
"""
from __future__ import annotations

import csv
import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .array import ArrayConfig, derive_seed, simulate_array
from .core import Polarity
from .stats import CLASSES, class_medians, pair_transitions

__all__ = [
    "CSV_COLUMNS",
    "SweepError",
    "SweepPoint",
    "SweepResult",
    "SweepSpec",
    "emit_sweep_csv",
    "evaluate_point",
    "read_sweep_csv",
    "run_refractory_sweep",
    "run_sweep",
    "run_threshold_ratio_sweep",
]

CSV_COLUMNS = (
    "value",
    "rate_total_hz",
    "rate_on_hz",
    "rate_off_hz",
    "opposite_fraction",
    "isi_med_on_on_us",
    "isi_med_on_off_us",
    "isi_med_off_on_us",
    "isi_med_off_off_us",
)

KINDS = ("refractory", "threshold_ratio")
# which threshold stays at its base value while the ratio moves;
# "sum" keeps theta_on + theta_off constant, i.e. only I_d changes
HOLDS = ("theta_off", "theta_on", "sum")


class SweepError(RuntimeError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    kind: str
    values: tuple[float, ...]
    base_cfg: ArrayConfig
    duration: float
    hold: str = "theta_off"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.kind not in KINDS:
            raise ValueError(f"sweep kind must be one of {KINDS}, got {self.kind!r}")
        if self.hold not in HOLDS:
            raise ValueError(f"hold must be one of {HOLDS}, got {self.hold!r}")
        v = np.asarray(self.values)
        if v.size == 0:
            raise ValueError("sweep values must be non-empty")
        if not np.all(np.isfinite(v)):
            raise ValueError("sweep values must be finite")
        d = np.diff(v)
        if not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("sweep values must be strictly monotonic")
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise ValueError(f"duration must be > 0, got {self.duration!r}")


@dataclass(frozen=True)
class SweepPoint:
    value: float
    rate_total_hz: float
    rate_on_hz: float
    rate_off_hz: float
    opposite_fraction: float
    isi_med_on_on_us: float
    isi_med_on_off_us: float
    isi_med_off_on_us: float
    isi_med_off_off_us: float

    def as_tuple(self) -> tuple[float, ...]:
        return dataclasses.astuple(self)


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, i: int) -> SweepPoint:
        return self.points[i]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points])

    def __eq__(self, other) -> bool:
        # NaN medians (empty classes) compare equal to themselves here
        if not isinstance(other, SweepResult):
            return NotImplemented
        if len(self) != len(other):
            return False
        a = np.array([p.as_tuple() for p in self.points])
        b = np.array([p.as_tuple() for p in other.points])
        return bool(np.array_equal(a, b, equal_nan=True))


def evaluate_point(value: float, events: np.ndarray, n_pixels: int, duration: float) -> SweepPoint:
    """Reduce one simulated stream to a sweep row."""
    n_on = int(np.count_nonzero(events["polarity"] == Polarity.ON))
    n_off = len(events) - n_on
    norm = n_pixels * duration
    med = class_medians(events)
    return SweepPoint(
        float(value),
        len(events) / norm,
        n_on / norm,
        n_off / norm,
        pair_transitions(events).opposite_fraction,
        *(med[c] for c in CLASSES),
    )


def _point_config(spec: SweepSpec, index: int, value: float) -> ArrayConfig:
    base = spec.base_cfg.base
    if spec.kind == "refractory":
        if value < 0:
            raise ValueError(f"refractory period must be >= 0, got {value}")
        params = base.replace(tau_refr=value)
    else:
        if not value > 0:
            raise ValueError(f"threshold ratio must be > 0, got {value}")
        if spec.hold == "theta_off":
            params = base.replace(theta_on=value * base.theta_off)
        elif spec.hold == "theta_on":
            params = base.replace(theta_off=base.theta_on / value)
        else:
            total = base.theta_on + base.theta_off
            params = base.replace(theta_on=total * value / (1 + value), theta_off=total / (1 + value))
    return dataclasses.replace(
        spec.base_cfg, base=params, master_seed=derive_seed(spec.base_cfg.master_seed, index)
    )


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> SweepResult:
    """Simulate every sweep point; rows come back in the order of ``spec.values``."""
    n_pixels = spec.base_cfg.width * spec.base_cfg.height

    def run(item):
        i, value = item
        try:
            cfg = _point_config(spec, i, value)
            events = simulate_array(cfg, spec.duration)
            return evaluate_point(value, events, n_pixels, spec.duration)
        except Exception as exc:
            raise SweepError(f"{spec.kind} sweep point {i} (value={value!r}) failed: {exc}") from exc

    items = list(enumerate(spec.values))
    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(run, items))
    else:
        points = [run(it) for it in items]
    return SweepResult(tuple(points))


def run_refractory_sweep(spec: SweepSpec, workers: Optional[int] = None) -> SweepResult:
    """Sweep ``tau_refr`` (seconds) with all other parameters at their base values."""
    if spec.kind != "refractory":
        raise ValueError(f"expected a refractory sweep, got kind={spec.kind!r}")
    return run_sweep(spec, workers)


def run_threshold_ratio_sweep(spec: SweepSpec, workers: Optional[int] = None) -> SweepResult:
    """Sweep ``theta_on / theta_off``; ``spec.hold`` picks what stays fixed (default ``theta_off``)."""
    if spec.kind != "threshold_ratio":
        raise ValueError(f"expected a threshold_ratio sweep, got kind={spec.kind!r}")
    bad = [v for v in spec.values if not v > 0]
    if bad:
        raise ValueError(f"threshold ratios must be > 0, got {bad}")
    return run_sweep(spec, workers)


def _fmt(v: float) -> str:
    # repr is locale-independent and round-trips doubles exactly
    return repr(float(v))


def emit_sweep_csv(result: SweepResult, path) -> None:
    try:
        with open(path, "w", newline="", encoding="ascii") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for p in result.points:
                w.writerow([_fmt(v) for v in p.as_tuple()])
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write sweep CSV: {exc.strerror}", str(path)) from exc


def read_sweep_csv(path) -> SweepResult:
    with open(path, newline="", encoding="ascii") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"{path}: header does not match the sweep CSV schema")
    return SweepResult(tuple(SweepPoint(*(float(x) for x in r)) for r in rows[1:]))
