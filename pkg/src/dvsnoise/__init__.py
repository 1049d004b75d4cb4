"""Simulation and statistics of DVS shot-noise events.

Noise-only DVS pixels produce ON/OFF events that come mostly in
opposite-polarity pairs because every event re-anchors the pixel's reference
level. This package simulates that mechanism and measures the pair statistics
and the rate changes caused by long refractory periods or unbalanced ON/OFF
thresholds.
"""
from .array import (
    ArrayConfig,
    BiasPoint,
    EventCapExceeded,
    bias_to_refractory,
    bias_to_thresholds,
    make_pixel_params,
    pixel_noise_seed,
    simulate_array,
)
from .core import (
    EVENT_DTYPE,
    DvsEvent,
    NoiseState,
    PixelParams,
    PixelState,
    Polarity,
    detect_events,
    init_noise,
    noise_step,
    ou_samples,
    pixel_step,
    simulate_pixel,
)
from .experiments import (
    SweepPoint,
    SweepResult,
    SweepSpec,
    emit_sweep_csv,
    read_sweep_csv,
    run_refractory_sweep,
    run_threshold_ratio_sweep,
)
from .io import (
    EventFileError,
    EventFileHeader,
    read_events,
    read_events_binary,
    read_events_csv,
    write_events_binary,
    write_events_csv,
)
from .stats import (
    IsiHistogram,
    PairStats,
    RateTable,
    class_medians,
    isi_by_class,
    pair_isis,
    pair_transitions,
    per_pixel_rates,
    rate_percentile_radius,
)

__version__ = "0.1.0"
