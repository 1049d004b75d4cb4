"""Run configuration: flat ``key = value`` text with ``#`` comments.

Example::

    # 64x64 array in the pairing regime
    width = 64
    height = 64
    theta_on = 0.8
    theta_off = 0.8
    tau_refr = 1.6e-5
    f3db = 100
    sigma_noise = 1.0
    mismatch_sigma_thresh = 0.2
    master_seed = 7
    duration = 1.0
    events_out = noise.evb

    # optional sweep
    sweep_kind = threshold_ratio
    sweep_values = 1.0, 0.3
    sweep_out = ratio.csv
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .array import DEFAULT_MAX_EVENTS, ArrayConfig
from .core import PixelParams
from .experiments import SweepSpec

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None, source: str = "<config>"):
        self.line = line
        self.key = key
        self.source = source
        where = source if line is None else f"{source}:{line}"
        what = f" key '{key}':" if key else ""
        super().__init__(f"{where}:{what} {message}")


def _float(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"{text!r} is not finite")
    return v


def _int(text: str) -> int:
    return int(text, 10)


def _floats(text: str) -> tuple[float, ...]:
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    if not parts:
        raise ValueError("empty list")
    return tuple(_float(p) for p in parts)


def _str(text: str) -> str:
    if not text:
        raise ValueError("empty value")
    return text


# key -> (parser, default); a default of ... marks a required key
_SCHEMA = {
    "width": (_int, 1),
    "height": (_int, 1),
    "theta_on": (_float, ...),
    "theta_off": (_float, ...),
    "tau_refr": (_float, ...),
    "f3db": (_float, ...),
    "sigma_noise": (_float, ...),
    "dt": (_float, None),
    "mismatch_sigma_thresh": (_float, 0.0),
    "master_seed": (_int, 0),
    "max_events": (_int, DEFAULT_MAX_EVENTS),
    "duration": (_float, ...),
    "workers": (_int, 1),
    "events_out": (_str, "events.evb"),
    "events_csv_out": (_str, None),
    "sweep_kind": (_str, None),
    "sweep_values": (_floats, None),
    "sweep_hold": (_str, "theta_off"),
    "sweep_out": (_str, "sweep.csv"),
}


@dataclass(frozen=True)
class RunConfig:
    array: ArrayConfig
    duration: float
    events_out: str
    events_csv_out: Optional[str] = None
    sweep: Optional[SweepSpec] = None
    sweep_out: str = "sweep.csv"
    workers: int = 1


def parse_config(text: str, source: str = "<config>", seed: Optional[int] = None) -> RunConfig:
    """Parse config text. ``seed`` overrides ``master_seed`` when given."""
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", lineno, source=source)
        key, _, val = (s.strip() for s in line.partition("="))
        if key not in _SCHEMA:
            raise ConfigError("unknown key", lineno, key or "<empty>", source)
        if key in values:
            raise ConfigError(f"duplicate key (first set on line {lines[key]})", lineno, key, source)
        try:
            values[key] = _SCHEMA[key][0](val)
        except ValueError as exc:
            raise ConfigError(f"invalid value {val!r} ({exc})", lineno, key, source) from None
        lines[key] = lineno

    for key, (_, default) in _SCHEMA.items():
        if key not in values:
            if default is ...:
                raise ConfigError("required key missing", key=key, source=source)
            values[key] = default
    if seed is not None:
        values["master_seed"] = seed

    def build(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, TypeError) as exc:
            msg = str(exc)
            key = next((k for k in sorted(_SCHEMA, key=len, reverse=True) if msg.startswith(k)), None)
            raise ConfigError(msg, lines.get(key), key, source) from None

    params = build(
        PixelParams,
        values["theta_on"], values["theta_off"], values["tau_refr"],
        values["f3db"], values["sigma_noise"], values["dt"],
    )
    array = build(
        ArrayConfig,
        values["width"], values["height"], params,
        values["mismatch_sigma_thresh"], values["master_seed"], values["max_events"],
    )
    if not values["duration"] > 0:
        raise ConfigError("duration must be > 0", lines.get("duration"), "duration", source)
    if values["workers"] < 1:
        raise ConfigError("workers must be >= 1", lines.get("workers"), "workers", source)

    sweep = None
    if values["sweep_kind"] is not None or values["sweep_values"] is not None:
        if values["sweep_kind"] is None or values["sweep_values"] is None:
            missing = "sweep_kind" if values["sweep_kind"] is None else "sweep_values"
            raise ConfigError("required when a sweep is configured", key=missing, source=source)
        kind = values["sweep_kind"]
        if kind not in ("refractory", "threshold_ratio"):
            raise ConfigError(f"unknown sweep kind {kind!r}", lines.get("sweep_kind"), "sweep_kind", source)
        if kind == "threshold_ratio" and any(v <= 0 for v in values["sweep_values"]):
            raise ConfigError("threshold ratios must be > 0", lines.get("sweep_values"), "sweep_values", source)
        try:
            sweep = SweepSpec(kind, values["sweep_values"], array, values["duration"], values["sweep_hold"])
        except ValueError as exc:
            key = "sweep_hold" if "hold" in str(exc) else "sweep_values"
            raise ConfigError(str(exc), lines.get(key), key, source) from None

    return RunConfig(
        array=array,
        duration=values["duration"],
        events_out=values["events_out"],
        events_csv_out=values["events_csv_out"],
        sweep=sweep,
        sweep_out=values["sweep_out"],
        workers=values["workers"],
    )


def load_config(path, seed: Optional[int] = None) -> RunConfig:
    """Read and parse a config file; I/O errors propagate as ``OSError``."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_config(text, str(path), seed)
