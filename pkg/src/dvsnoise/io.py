"""Event and statistics file formats.

Binary event file (little-endian)::

    offset  size  field
    0       4     magic  b"DVSN"
    4       2     format version (u16, currently 1)
    6       2     width  (u16)
    8       2     height (u16)
    10      8     event count (u64)
    18      13*N  records: t_us u64, x u16, y u16, polarity u8 (1 = ON, 0 = OFF)
"""
from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import EVENT_DTYPE
from .stats import CLASS_NAMES, IsiHistogram, PairStats, RateTable

__all__ = [
    "BadMagicError",
    "EventFileError",
    "EventFileHeader",
    "MAGIC",
    "TruncatedFileError",
    "UnsupportedVersionError",
    "read_events",
    "read_events_binary",
    "read_events_csv",
    "write_events_binary",
    "write_events_csv",
    "write_isi_csv",
    "write_pairstats_csv",
    "write_rates_csv",
]

MAGIC = b"DVSN"
VERSION = 1
_HEADER = struct.Struct("<4sHHHQ")
EVENT_CSV_HEADER = ("t_us", "x", "y", "polarity")


class EventFileError(ValueError):
    """Malformed event file."""


class BadMagicError(EventFileError):
    pass


class UnsupportedVersionError(EventFileError):
    pass


class TruncatedFileError(EventFileError):
    pass


@dataclass(frozen=True)
class EventFileHeader:
    width: int
    height: int
    count: int = 0
    version: int = VERSION
    magic: bytes = MAGIC

    def pack(self) -> bytes:
        return _HEADER.pack(self.magic, self.version, self.width, self.height, self.count)


def _as_events(events) -> np.ndarray:
    events = np.asarray(events)
    if events.dtype != EVENT_DTYPE:
        events = events.astype(EVENT_DTYPE)
    return events


def _check_writable(events: np.ndarray, width: int, height: int) -> None:
    t = events["t_us"]
    if len(t) > 1 and np.any(t[1:] < t[:-1]):
        raise ValueError("events must be sorted by timestamp")
    if len(events) and (events["x"].max() >= width or events["y"].max() >= height):
        raise ValueError(f"event coordinates exceed the {width}x{height} header dimensions")
    if len(events) and events["polarity"].max() > 1:
        raise ValueError("polarity must be 0 (OFF) or 1 (ON)")


def write_events_binary(events, header: EventFileHeader, path) -> None:
    """Write ``events`` with ``header``; the header count is set from the data."""
    events = _as_events(events)
    _check_writable(events, header.width, header.height)
    head = EventFileHeader(header.width, header.height, len(events))
    with open(path, "wb") as fh:
        fh.write(head.pack())
        fh.write(events.tobytes())


def read_events_header(path) -> EventFileHeader:
    with open(path, "rb") as fh:
        return _parse_header(fh.read(_HEADER.size), path)


def _parse_header(raw: bytes, path) -> EventFileHeader:
    if len(raw) < len(MAGIC) or raw[: len(MAGIC)] != MAGIC:
        raise BadMagicError(f"{path}: not a DVSN event file (bad magic)")
    if len(raw) < _HEADER.size:
        raise TruncatedFileError(f"{path}: header truncated ({len(raw)} of {_HEADER.size} bytes)")
    magic, version, width, height, count = _HEADER.unpack(raw[: _HEADER.size])
    if version != VERSION:
        raise UnsupportedVersionError(f"{path}: unsupported format version {version} (expected {VERSION})")
    return EventFileHeader(width, height, count, version, magic)


def read_events_binary(path, with_header: bool = False):
    """Read a binary event file; optionally also return its header."""
    raw = Path(path).read_bytes()
    header = _parse_header(raw, path)
    body = raw[_HEADER.size:]
    expected = header.count * EVENT_DTYPE.itemsize
    if len(body) < expected:
        raise TruncatedFileError(f"{path}: expected {header.count} records ({expected} bytes), found {len(body)} bytes")
    if len(body) > expected:
        raise EventFileError(f"{path}: {len(body) - expected} trailing bytes after {header.count} records")
    events = np.frombuffer(body, dtype=EVENT_DTYPE).copy()
    return (events, header) if with_header else events


def write_events_csv(events, path) -> None:
    events = _as_events(events)
    t = events["t_us"]
    if len(t) > 1 and np.any(t[1:] < t[:-1]):
        raise ValueError("events must be sorted by timestamp")
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EVENT_CSV_HEADER)
        w.writerows(events.tolist())


def read_events_csv(path) -> np.ndarray:
    with open(path, newline="", encoding="ascii") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != EVENT_CSV_HEADER:
        raise EventFileError(f"{path}: expected header {','.join(EVENT_CSV_HEADER)}")
    try:
        return np.array([tuple(int(v) for v in r) for r in rows[1:]], dtype=EVENT_DTYPE)
    except (ValueError, TypeError, OverflowError) as exc:
        raise EventFileError(f"{path}: malformed event row: {exc}") from exc


def read_events(path) -> np.ndarray:
    """Read either format, picking CSV by the ``.csv`` suffix."""
    if str(path).lower().endswith(".csv"):
        return read_events_csv(path)
    return read_events_binary(path)


def write_pairstats_csv(ps: PairStats, path) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("on_on", "on_off", "off_on", "off_off", "total_pairs", "opposite_fraction"))
        c = ps.counts
        w.writerow((c[1, 1], c[1, 0], c[0, 1], c[0, 0], ps.total, repr(ps.opposite_fraction)))


def write_isi_csv(hists: list[IsiHistogram], path) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("class", "bin_lo_us", "bin_hi_us", "count"))
        for h in hists:
            for lo, hi, n in zip(h.bin_edges[:-1], h.bin_edges[1:], h.counts):
                w.writerow((CLASS_NAMES[h.cls], repr(float(lo)), repr(float(hi)), int(n)))


def write_rates_csv(table: RateTable, path) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("x", "y", "rate_on_hz", "rate_off_hz"))
        for r in table.rows:
            w.writerow((int(r["x"]), int(r["y"]), repr(float(r["rate_on"])), repr(float(r["rate_off"]))))
