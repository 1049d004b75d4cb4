import hashlib
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dvsnoise import EVENT_DTYPE
from dvsnoise.io import (
    MAGIC,
    BadMagicError,
    EventFileError,
    EventFileHeader,
    TruncatedFileError,
    UnsupportedVersionError,
    read_events,
    read_events_binary,
    read_events_csv,
    write_events_binary,
    write_events_csv,
)


def events(rows):
    return np.array(rows, dtype=EVENT_DTYPE)


@st.composite
def streams(draw):
    n = draw(st.integers(0, 50))
    rows = sorted(
        (draw(st.integers(0, 2**64 - 1)), draw(st.integers(0, 639)), draw(st.integers(0, 479)), draw(st.integers(0, 1)))
        for _ in range(n)
    )
    return events(rows)


def test_record_encoding(tmp_path):
    path = tmp_path / "one.evb"
    write_events_binary(events([(5, 1, 2, 1)]), EventFileHeader(4, 4), path)
    raw = path.read_bytes()
    assert raw[18:] == bytes.fromhex("05 00 00 00 00 00 00 00 01 00 02 00 01")
    assert raw[:18] == MAGIC + struct.pack("<HHHQ", 1, 4, 4, 1)
    assert EVENT_DTYPE.itemsize == 13


def test_empty_stream(tmp_path):
    path = tmp_path / "empty.evb"
    write_events_binary(events([]), EventFileHeader(8, 8), path)
    assert path.stat().st_size == 18
    ev, header = read_events_binary(path, with_header=True)
    assert len(ev) == 0 and header == EventFileHeader(8, 8, 0)


@settings(max_examples=100)
@given(streams())
def test_binary_round_trip(tmp_path_factory, ev):
    path = tmp_path_factory.mktemp("rt") / "e.evb"
    write_events_binary(ev, EventFileHeader(640, 480), path)
    back = read_events_binary(path)
    assert back.dtype == EVENT_DTYPE and back.tobytes() == ev.tobytes()


@settings(max_examples=100)
@given(streams())
def test_csv_round_trip(tmp_path_factory, ev):
    path = tmp_path_factory.mktemp("rt") / "e.csv"
    write_events_csv(ev, path)
    assert read_events_csv(path).tobytes() == ev.tobytes()
    assert read_events(path).tobytes() == ev.tobytes()


def test_csv_layout(tmp_path):
    path = tmp_path / "e.csv"
    write_events_csv(events([(5, 1, 2, 1), (7, 0, 3, 0)]), path)
    assert path.read_text() == "t_us,x,y,polarity\n5,1,2,1\n7,0,3,0\n"


def test_million_event_round_trip_is_byte_stable(tmp_path):
    rng = np.random.default_rng(0)
    n = 10**6
    ev = np.empty(n, dtype=EVENT_DTYPE)
    ev["t_us"] = np.sort(rng.integers(0, 10**10, n))
    ev["x"] = rng.integers(0, 346, n)
    ev["y"] = rng.integers(0, 260, n)
    ev["polarity"] = rng.integers(0, 2, n)
    header = EventFileHeader(346, 260)
    digests = []
    for i in range(2):
        path = tmp_path / f"c{i}.evb"
        write_events_binary(ev, header, path)
        digests.append(hashlib.sha256(path.read_bytes()).hexdigest())
        ev = read_events_binary(path)
    assert digests[0] == digests[1]


class TestErrors:
    def write(self, tmp_path, data):
        path = tmp_path / "bad.evb"
        path.write_bytes(data)
        return path

    def good(self, tmp_path):
        path = tmp_path / "good.evb"
        write_events_binary(events([(1, 0, 0, 1), (2, 0, 0, 0)]), EventFileHeader(2, 2), path)
        return path.read_bytes()

    def test_bad_magic(self, tmp_path):
        with pytest.raises(BadMagicError):
            read_events_binary(self.write(tmp_path, b"AEDAT" + self.good(tmp_path)[5:]))

    def test_bad_version(self, tmp_path):
        raw = bytearray(self.good(tmp_path))
        raw[4:6] = struct.pack("<H", 9)
        with pytest.raises(UnsupportedVersionError):
            read_events_binary(self.write(tmp_path, bytes(raw)))

    def test_truncated_records(self, tmp_path):
        with pytest.raises(TruncatedFileError):
            read_events_binary(self.write(tmp_path, self.good(tmp_path)[:-1]))

    def test_truncated_header(self, tmp_path):
        with pytest.raises(TruncatedFileError):
            read_events_binary(self.write(tmp_path, self.good(tmp_path)[:10]))

    def test_trailing_bytes(self, tmp_path):
        with pytest.raises(EventFileError):
            read_events_binary(self.write(tmp_path, self.good(tmp_path) + b"\0"))

    def test_error_kinds_are_distinct(self):
        kinds = {BadMagicError, UnsupportedVersionError, TruncatedFileError}
        assert len(kinds) == 3 and all(issubclass(k, EventFileError) for k in kinds)

    def test_write_preconditions(self, tmp_path):
        with pytest.raises(ValueError):
            write_events_binary(events([(5, 0, 0, 1), (1, 0, 0, 1)]), EventFileHeader(2, 2), tmp_path / "x")
        with pytest.raises(ValueError):
            write_events_binary(events([(5, 2, 0, 1)]), EventFileHeader(2, 2), tmp_path / "x")

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            read_events_binary(tmp_path / "nope.evb")
