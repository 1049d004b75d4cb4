"""Command-line front end.

    dvsnoise simulate --config run.txt [--seed N] [--out events.evb] [--csv events.csv]
    dvsnoise sweep    --config run.txt [--seed N] [--out sweep.csv]
    dvsnoise stats    events.evb --out-dir DIR [--duration S] [--bins-per-decade N]

Exit codes: 0 success, 1 usage or configuration error, 2 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import io as evio
from .array import EventCapExceeded, simulate_array
from .config import ConfigError, load_config
from .experiments import SweepError, emit_sweep_csv, run_refractory_sweep, run_threshold_ratio_sweep
from .stats import isi_by_class, pair_transitions, per_pixel_rates

logger = logging.getLogger("dvsnoise")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dvsnoise", description="DVS shot-noise event simulator and statistics")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="simulate a noise-only pixel array")
    sim.add_argument("--config", required=True, type=Path)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--out", type=Path, help="binary event file (overrides events_out)")
    sim.add_argument("--csv", type=Path, help="also write events as CSV (overrides events_csv_out)")

    sw = sub.add_parser("sweep", help="run the configured bias sweep")
    sw.add_argument("--config", required=True, type=Path)
    sw.add_argument("--seed", type=int)
    sw.add_argument("--out", type=Path, help="sweep CSV (overrides sweep_out)")

    st = sub.add_parser("stats", help="pair, ISI and rate statistics of an event file")
    st.add_argument("events", type=Path)
    st.add_argument("--out-dir", required=True, type=Path)
    st.add_argument("--duration", type=float, help="analysis window in seconds (default: last timestamp)")
    st.add_argument("--bins-per-decade", type=int, default=8)
    st.add_argument("--t-min-us", type=float, default=10.0)
    st.add_argument("--t-max-us", type=float, default=1e7)
    return parser


def _simulate(args) -> int:
    cfg = load_config(args.config, args.seed)
    events = simulate_array(cfg.array, cfg.duration, cfg.workers)
    out = args.out or Path(cfg.events_out)
    header = evio.EventFileHeader(cfg.array.width, cfg.array.height)
    evio.write_events_binary(events, header, out)
    logger.info("wrote %d events to %s", len(events), out)
    csv_out = args.csv or (Path(cfg.events_csv_out) if cfg.events_csv_out else None)
    if csv_out:
        evio.write_events_csv(events, csv_out)
        logger.info("wrote %s", csv_out)
    return EXIT_OK


def _sweep(args) -> int:
    cfg = load_config(args.config, args.seed)
    if cfg.sweep is None:
        raise ConfigError("no sweep configured (set sweep_kind and sweep_values)", source=str(args.config))
    run = run_refractory_sweep if cfg.sweep.kind == "refractory" else run_threshold_ratio_sweep
    result = run(cfg.sweep, cfg.workers)
    out = args.out or Path(cfg.sweep_out)
    emit_sweep_csv(result, out)
    logger.info("wrote %d sweep rows to %s", len(result), out)
    return EXIT_OK


def _stats(args) -> int:
    events = evio.read_events(args.events)
    if args.bins_per_decade < 1:
        raise UsageError("--bins-per-decade must be >= 1")
    duration = args.duration
    if duration is None:
        duration = (int(events["t_us"][-1]) if len(events) else 0) * 1e-6
    if not duration > 0:
        raise UsageError("cannot infer a positive analysis window; pass --duration")
    ps = pair_transitions(events)
    hists = isi_by_class(events, args.bins_per_decade, args.t_min_us, args.t_max_us)
    rates = per_pixel_rates(events, duration)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    evio.write_pairstats_csv(ps, args.out_dir / "pairstats.csv")
    evio.write_isi_csv(hists, args.out_dir / "isi_hist.csv")
    evio.write_rates_csv(rates, args.out_dir / "rates.csv")
    logger.info("%d events, %d pairs, opposite fraction %.4f", len(events), ps.total, ps.opposite_fraction)
    return EXIT_OK


_COMMANDS = {"simulate": _simulate, "sweep": _sweep, "stats": _stats}


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        logger.addHandler(handler)
        logger.setLevel(logging.INFO)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        logger.error("config error: %s", exc)
        return EXIT_CONFIG
    except (OSError, evio.EventFileError) as exc:
        logger.error("I/O error: %s", exc)
        return EXIT_IO
    except (SweepError, EventCapExceeded, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
