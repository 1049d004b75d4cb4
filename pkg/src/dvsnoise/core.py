"""Single-pixel DVS noise model.

A pixel sees its log-intensity signal corrupted by low-pass filtered Gaussian
noise (an Ornstein-Uhlenbeck process with corner frequency ``f3db``). The
change detector memorizes a reference level and emits ON/OFF events when the
signal departs from it by more than the respective threshold. After each event
the pixel is held in reset for ``tau_refr`` seconds; the reference is re-sampled
from the signal when the reset releases.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

import numba
import numpy as np

__all__ = [
    "EVENT_DTYPE",
    "DvsEvent",
    "NoiseState",
    "PixelParams",
    "PixelState",
    "Polarity",
    "SeedLike",
    "detect_events",
    "init_noise",
    "make_events",
    "noise_step",
    "ou_coefficients",
    "ou_samples",
    "pixel_step",
    "simulate_pixel",
]

#: packed little-endian record, 13 bytes, identical to the on-disk layout
EVENT_DTYPE = np.dtype([("t_us", "<u8"), ("x", "<u2"), ("y", "<u2"), ("polarity", "u1")])

SeedLike = Union[int, Sequence[int], np.random.SeedSequence]

# hard ceiling on the step counter of a single run
MAX_STEPS = 2**53
_CHUNK = 1 << 18


class Polarity(enum.IntEnum):
    OFF = 0
    ON = 1


class DvsEvent(NamedTuple):
    t_us: int
    x: int
    y: int
    polarity: Polarity


@dataclass(frozen=True)
class PixelParams:
    """Per-pixel model configuration.

    Thresholds and ``sigma_noise`` are in natural-log intensity units.
    ``dt`` defaults to ``1 / (50 * f3db)``.
    """

    theta_on: float
    theta_off: float
    tau_refr: float
    f3db: float
    sigma_noise: float
    dt: Optional[float] = None

    def __post_init__(self):
        if self.dt is None:
            object.__setattr__(self, "dt", 1.0 / (50.0 * self.f3db) if self.f3db > 0 else math.nan)
        for name in ("theta_on", "theta_off", "tau_refr", "f3db", "sigma_noise", "dt"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
                raise ValueError(f"{name} must be a finite number, got {value!r}")
        if self.theta_on <= 0:
            raise ValueError(f"theta_on must be > 0, got {self.theta_on}")
        if self.theta_off <= 0:
            raise ValueError(f"theta_off must be > 0, got {self.theta_off}")
        if self.tau_refr < 0:
            raise ValueError(f"tau_refr must be >= 0, got {self.tau_refr}")
        if self.f3db <= 0:
            raise ValueError(f"f3db must be > 0, got {self.f3db}")
        if self.sigma_noise < 0:
            raise ValueError(f"sigma_noise must be >= 0, got {self.sigma_noise}")
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.dt > 1.0 / (20.0 * self.f3db):
            raise ValueError(
                f"dt={self.dt} does not resolve the noise correlation time; "
                f"need dt <= 1/(20*f3db) = {1.0 / (20.0 * self.f3db)}"
            )

    @property
    def tau_noise(self) -> float:
        """Noise correlation time 1/(2*pi*f3db), seconds."""
        return 1.0 / (2.0 * math.pi * self.f3db)

    def replace(self, **changes) -> "PixelParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class NoiseState:
    """Current noise sample plus the generator that produces the next draws.

    The generator is consumed by :func:`noise_step`; states sharing one
    generator are not independent.
    """

    value: float
    rng: np.random.Generator


@dataclass(frozen=True)
class PixelState:
    v_ref: float
    in_refractory: bool = False
    refractory_end: float = 0.0
    t_last: float = -math.inf


def _as_seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def init_noise(sigma_noise: float, seed: SeedLike) -> NoiseState:
    """Start a noise process with its first sample drawn from the stationary law."""
    rng = np.random.default_rng(_as_seed_sequence(seed))
    return NoiseState(sigma_noise * rng.standard_normal(), rng)


def ou_coefficients(sigma_noise: float, f3db: float, dt: float) -> tuple[float, float]:
    """Return ``(a, c)`` of the exact update ``x' = a*x + c*g``."""
    a = math.exp(-2.0 * math.pi * f3db * dt)
    c = sigma_noise * math.sqrt(1.0 - a * a)
    return a, c


def noise_step(state: NoiseState, sigma_noise: float, f3db: float, dt: float) -> tuple[NoiseState, float]:
    """Advance the Ornstein-Uhlenbeck noise by one exact-discretization step.

    The stationary standard deviation is ``sigma_noise`` for any ``dt``.
    """
    a, c = ou_coefficients(sigma_noise, f3db, dt)
    value = state.value * a + c * state.rng.standard_normal()
    return NoiseState(value, state.rng), value


@numba.njit(nogil=True, cache=True)
def _ou_fill(g, value, a, c, out):
    for i in range(g.shape[0]):
        value = value * a + c * g[i]
        out[i] = value
    return value


def ou_samples(n: int, sigma_noise: float, f3db: float, dt: float, seed: SeedLike) -> np.ndarray:
    """Return ``n`` consecutive noise samples, starting with the stationary draw.

    Bit-identical to repeated :func:`noise_step` calls from :func:`init_noise`.
    """
    state = init_noise(sigma_noise, seed)
    out = np.empty(n)
    if n == 0:
        return out
    out[0] = state.value
    a, c = ou_coefficients(sigma_noise, f3db, dt)
    _ou_fill(state.rng.standard_normal(n - 1), state.value, a, c, out[1:])
    return out


def pixel_step(
    pstate: PixelState, sample: float, t: float, params: PixelParams
) -> tuple[PixelState, Optional[Polarity]]:
    """Run the change detector on one signal sample taken at time ``t``."""
    if not t > pstate.t_last:
        raise ValueError(f"pixel time must increase strictly: t={t} after t={pstate.t_last}")
    v_ref, in_refr, refr_end = pstate.v_ref, pstate.in_refractory, pstate.refractory_end
    if in_refr:
        if t < refr_end:
            return PixelState(v_ref, True, refr_end, t), None
        # reset releases: reference re-sampled from the signal
        v_ref, in_refr = sample, False
    polarity = _crossing(sample - v_ref, params.theta_on, params.theta_off)
    if polarity < 0:
        return PixelState(v_ref, False, refr_end, t), None
    return PixelState(v_ref, True, t + params.tau_refr, t), Polarity(polarity)


@numba.njit(inline="always")
def _crossing(deviation, theta_on, theta_off):
    # with positive thresholds at most one side can be exceeded
    if deviation > theta_on:
        return 1
    if -deviation > theta_off:
        return 0
    return -1


@numba.njit(nogil=True, cache=True)
def _detect(signal, k0, dt, theta_on, theta_off, tau_refr, v_ref, in_refr, refr_end, out_k, out_pol):
    n = 0
    for i in range(signal.shape[0]):
        t = (k0 + i) * dt
        if in_refr:
            if t < refr_end:
                continue
            v_ref = signal[i]
            in_refr = False
        p = _crossing(signal[i] - v_ref, theta_on, theta_off)
        if p >= 0:
            out_k[n] = k0 + i
            out_pol[n] = p
            n += 1
            in_refr = True
            refr_end = t + tau_refr
    return n, v_ref, in_refr, refr_end


class _Detector:
    """Chunked driver around the compiled change detector."""

    def __init__(self, params: PixelParams, v_ref: float):
        self.params = params
        self.v_ref = float(v_ref)
        self.in_refr = False
        self.refr_end = 0.0
        self.steps: list[np.ndarray] = []
        self.pols: list[np.ndarray] = []

    def feed(self, signal: np.ndarray, k0: int) -> None:
        p = self.params
        out_k = np.empty(signal.shape[0], dtype=np.int64)
        out_pol = np.empty(signal.shape[0], dtype=np.uint8)
        n, self.v_ref, self.in_refr, self.refr_end = _detect(
            signal, k0, p.dt, p.theta_on, p.theta_off, p.tau_refr,
            self.v_ref, self.in_refr, self.refr_end, out_k, out_pol,
        )
        if n:
            self.steps.append(out_k[:n].copy())
            self.pols.append(out_pol[:n].copy())

    def result(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.steps:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.uint8)
        return np.concatenate(self.steps), np.concatenate(self.pols)


def detect_events(signal: np.ndarray, params: PixelParams) -> tuple[np.ndarray, np.ndarray]:
    """Run the change detector over an arbitrary sampled signal.

    ``signal[k]`` is the sample at time ``k * params.dt``; the reference is
    initialized to ``signal[0]``. Returns ``(step_indices, polarities)``.
    """
    signal = np.ascontiguousarray(signal, dtype=np.float64)
    if signal.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.uint8)
    det = _Detector(params, signal[0])
    det.feed(signal[1:], 1)
    return det.result()


def _n_steps(duration: float, dt: float) -> int:
    if not (math.isfinite(duration) and duration > 0):
        raise ValueError(f"duration must be a positive finite number, got {duration!r}")
    ratio = duration / dt
    if not math.isfinite(ratio) or ratio >= MAX_STEPS:
        raise OverflowError(f"duration/dt = {ratio:g} steps exceeds the step counter limit {MAX_STEPS}")
    # tolerate float noise in duration/dt
    return int(math.floor(ratio + 1e-9)) + 1


def make_events(steps: np.ndarray, polarity: np.ndarray, dt: float, x: int = 0, y: int = 0) -> np.ndarray:
    """Pack step indices into an :data:`EVENT_DTYPE` array (floor to microseconds)."""
    ev = np.empty(len(steps), dtype=EVENT_DTYPE)
    ev["t_us"] = np.floor(steps * dt * 1e6 + 1e-6).astype(np.uint64)
    ev["x"] = x
    ev["y"] = y
    ev["polarity"] = polarity
    return ev


def simulate_pixel(params: PixelParams, duration: float, seed: SeedLike, x: int = 0, y: int = 0) -> np.ndarray:
    """Simulate one pixel driven only by noise for ``duration`` seconds.

    Samples are taken at ``k * dt`` for ``k = 0 .. floor(duration/dt)``; the
    reference starts at the first sample so there is no startup event.
    Returns a structured array with :data:`EVENT_DTYPE`.
    """
    n = _n_steps(duration, params.dt)
    state = init_noise(params.sigma_noise, seed)
    a, c = ou_coefficients(params.sigma_noise, params.f3db, params.dt)
    det = _Detector(params, state.value)
    value = state.value
    k = 1
    buf = np.empty(_CHUNK)
    while k < n:
        m = min(_CHUNK, n - k)
        out = buf[:m]
        value = _ou_fill(state.rng.standard_normal(m), value, a, c, out)
        det.feed(out, k)
        k += m
    steps, pols = det.result()
    return make_events(steps, pols, params.dt, x, y)
