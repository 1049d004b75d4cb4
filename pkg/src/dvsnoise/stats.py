"""Noise-event statistics: per-pixel rates, polarity transitions, ISI histograms.

All pairing is per pixel: a pair is two consecutive events of the same pixel.
Within a pixel, events sharing a timestamp are ordered ON before OFF.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import EVENT_DTYPE, Polarity

__all__ = [
    "CLASSES",
    "IsiHistogram",
    "PairStats",
    "RateTable",
    "class_medians",
    "isi_by_class",
    "pair_isis",
    "pair_transitions",
    "per_pixel_rates",
    "rate_percentile_radius",
]

#: transition classes as (previous, next) polarity, in the fixed reporting order
CLASSES = (
    (Polarity.ON, Polarity.ON),
    (Polarity.ON, Polarity.OFF),
    (Polarity.OFF, Polarity.ON),
    (Polarity.OFF, Polarity.OFF),
)
CLASS_NAMES = {c: f"{c[0].name}->{c[1].name}" for c in CLASSES}

RATE_DTYPE = np.dtype([("x", "<u2"), ("y", "<u2"), ("rate_on", "<f8"), ("rate_off", "<f8")])


@dataclass(frozen=True)
class PairStats:
    """Consecutive same-pixel pair counts, ``counts[prev, next]`` indexed by polarity value."""

    counts: np.ndarray

    def count(self, prev: Polarity, nxt: Polarity) -> int:
        return int(self.counts[int(prev), int(nxt)])

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def opposite_fraction(self) -> float:
        total = self.total
        if total == 0:
            return math.nan
        return (self.count(Polarity.ON, Polarity.OFF) + self.count(Polarity.OFF, Polarity.ON)) / total


@dataclass(frozen=True)
class IsiHistogram:
    cls: tuple[Polarity, Polarity]
    bin_edges: np.ndarray
    counts: np.ndarray

    @property
    def name(self) -> str:
        return CLASS_NAMES[self.cls]


@dataclass(frozen=True)
class RateTable:
    rows: np.ndarray  # RATE_DTYPE
    duration: float

    def __len__(self) -> int:
        return len(self.rows)


def _canonical_pairs(events: np.ndarray):
    """Group events by pixel in time order; return (prev, next) index arrays and the sorted view."""
    events = np.asarray(events)
    if events.dtype != EVENT_DTYPE:
        events = events.astype(EVENT_DTYPE)
    t = events["t_us"]
    if len(t) > 1 and np.any(t[1:] < t[:-1]):
        raise ValueError("events must be sorted by timestamp")
    pixel = (events["y"].astype(np.int64) << 16) | events["x"].astype(np.int64)
    order = np.lexsort((1 - events["polarity"].astype(np.int16), t, pixel))
    ev = events[order]
    pix = pixel[order]
    same = pix[1:] == pix[:-1]
    idx = np.flatnonzero(same)
    return ev, idx, idx + 1


def pair_transitions(events: np.ndarray) -> PairStats:
    """Count polarity transitions between consecutive events of each pixel."""
    ev, i0, i1 = _canonical_pairs(events)
    counts = np.zeros((2, 2), dtype=np.int64)
    np.add.at(counts, (ev["polarity"][i0], ev["polarity"][i1]), 1)
    return PairStats(counts)


def pair_isis(events: np.ndarray) -> dict[tuple[Polarity, Polarity], np.ndarray]:
    """Inter-event intervals (us) of consecutive same-pixel pairs, split by class."""
    ev, i0, i1 = _canonical_pairs(events)
    isi = (ev["t_us"][i1] - ev["t_us"][i0]).astype(np.int64)
    p0, p1 = ev["polarity"][i0], ev["polarity"][i1]
    return {c: isi[(p0 == c[0]) & (p1 == c[1])] for c in CLASSES}


def class_medians(events: np.ndarray) -> dict[tuple[Polarity, Polarity], float]:
    """Median ISI per transition class in microseconds; NaN for empty classes."""
    return {c: float(np.median(v)) if len(v) else math.nan for c, v in pair_isis(events).items()}


def log_bin_edges(bins_per_decade: int, t_min_us: float, t_max_us: float) -> np.ndarray:
    n_bins = max(1, math.ceil(bins_per_decade * math.log10(t_max_us / t_min_us) - 1e-9))
    return np.logspace(math.log10(t_min_us), math.log10(t_max_us), n_bins + 1)


def isi_by_class(
    events: np.ndarray, bins_per_decade: int = 8, t_min_us: float = 10.0, t_max_us: float = 1e7
) -> list[IsiHistogram]:
    """Log-binned ISI histograms for the four transition classes.

    Bins are half-open ``[lo, hi)``; ISIs outside ``[t_min_us, t_max_us)`` are
    clamped into the first or last bin.
    """
    if t_min_us < 1:
        raise ValueError(f"t_min_us must be >= 1, got {t_min_us}")
    if not t_max_us > t_min_us:
        raise ValueError(f"t_max_us ({t_max_us}) must exceed t_min_us ({t_min_us})")
    if bins_per_decade < 1 or int(bins_per_decade) != bins_per_decade:
        raise ValueError(f"bins_per_decade must be a positive integer, got {bins_per_decade}")
    edges = log_bin_edges(int(bins_per_decade), t_min_us, t_max_us)
    n_bins = len(edges) - 1
    out = []
    for cls, isi in pair_isis(events).items():
        idx = np.clip(np.searchsorted(edges, isi, side="right") - 1, 0, n_bins - 1)
        out.append(IsiHistogram(cls, edges.copy(), np.bincount(idx, minlength=n_bins).astype(np.int64)))
    return out


def per_pixel_rates(events: np.ndarray, duration: float) -> RateTable:
    """ON and OFF event rates (Hz) of every pixel with at least one event."""
    if not duration > 0:
        raise ValueError(f"duration must be > 0, got {duration}")
    events = np.asarray(events)
    if len(events) == 0:
        return RateTable(np.empty(0, dtype=RATE_DTYPE), float(duration))
    pixel = (events["y"].astype(np.int64) << 16) | events["x"].astype(np.int64)
    keys, inv = np.unique(pixel, return_inverse=True)
    on = np.bincount(inv, weights=(events["polarity"] == Polarity.ON), minlength=len(keys))
    off = np.bincount(inv, weights=(events["polarity"] == Polarity.OFF), minlength=len(keys))
    rows = np.empty(len(keys), dtype=RATE_DTYPE)
    rows["x"] = keys & 0xFFFF
    rows["y"] = keys >> 16
    rows["rate_on"] = on / duration
    rows["rate_off"] = off / duration
    return RateTable(rows, float(duration))


def rate_percentile_radius(table: RateTable, p: float) -> float:
    """Nearest-rank ``p``-th percentile of ``sqrt(rate_on**2 + rate_off**2)`` over pixels."""
    if not 0 < p < 100:
        raise ValueError(f"percentile must lie in (0, 100), got {p}")
    if len(table) == 0:
        raise ValueError("rate table is empty")
    mag = np.sort(np.hypot(table.rows["rate_on"], table.rows["rate_off"]))
    rank = math.ceil(p * len(mag) / 100.0 - 1e-9)
    return float(mag[max(rank, 1) - 1])
