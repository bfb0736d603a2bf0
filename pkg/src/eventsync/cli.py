"""Command-line driver.

Subcommands::

    eventsync analyze  --events events.csv --config run.cfg --out report.csv
    eventsync stream   --events events.csv --config run.cfg --out report.csv
    eventsync synth    --example composed --out-dir fixtures/
    eventsync baseline --events pair.csv --tau 5
    eventsync bench    --n-series 2 --k-classes 4 --merg-dim 10000

Exit codes: 0 success, 2 usage or configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import fixtures
from .errors import (
    AdaptiveTauUnsupportedError,
    ConfigError,
    DataFormatError,
    EventSyncError,
    GeometryMismatchError,
    NonPositiveTauError,
    ZeroWeightSumError,
)
from .events import CoincidenceParams, validate_dataset
from .io import (
    RunConfig,
    parse_config,
    read_dataset_csv,
    write_events_csv,
    write_reports_csv,
    write_signal_csv,
)
from .macro import apply_macro_classes, detect_sequence_set
from .signals import Signal
from .streaming import (
    SequenceStreamSession,
    StreamEngine,
    dataset_to_buffers,
    merge_buffer_classes,
)
from .sync import analyze, pairwise_sync, quiroga_es

_USAGE_ERRORS = (ConfigError, NonPositiveTauError, ZeroWeightSumError,
                 GeometryMismatchError, AdaptiveTauUnsupportedError)


def _load(args) -> tuple[RunConfig, "EventDataset"]:
    cfg = parse_config(args.config, tau=args.tau, iei=args.iei,
                       buff_dim=getattr(args, "buff_dim", None),
                       n_overlapped=getattr(args, "n_overlapped", None))
    dataset = read_dataset_csv(args.events, cfg)
    return cfg, dataset


def cmd_analyze(args) -> int:
    cfg, dataset = _load(args)
    names = cfg.derived_class_names
    if cfg.macro_specs:
        dataset = apply_macro_classes(dataset, cfg.macro_specs)
    elif cfg.sequence_specs:
        dataset = detect_sequence_set(dataset, cfg.sequence_specs)
    report = analyze(dataset, cfg.params, weights=cfg.weights,
                     include_inter=not args.no_inter)
    write_reports_csv(args.out, [report], names)
    for note in report.notes:
        print(f"note: {note}")
    print(f"wrote {args.out}")
    return 0


def cmd_stream(args) -> int:
    cfg, dataset = _load(args)
    if cfg.buff_dim is None:
        raise ConfigError("streaming needs buff_dim ([stream] or --buff-dim)")
    names = cfg.derived_class_names
    class_pairs = None if args.no_inter else "all"
    buffers = dataset_to_buffers(dataset, cfg.buff_dim, cfg.n_overlapped,
                                 duration=args.duration)
    if cfg.sequence_specs:
        session = SequenceStreamSession(
            cfg.n_series, len(cfg.class_names), cfg.sequence_specs,
            cfg.params, cfg.buff_dim, cfg.n_overlapped,
            class_pairs=class_pairs)
        reports = [session.push(b) for b in buffers]
    elif cfg.macro_specs:
        engine = StreamEngine(cfg.n_series, len(cfg.macro_specs), cfg.params,
                              cfg.buff_dim, cfg.n_overlapped,
                              class_pairs=class_pairs)
        reports = [engine.push(merge_buffer_classes(b, cfg.macro_specs))
                   for b in buffers]
    else:
        engine = StreamEngine(cfg.n_series, len(cfg.class_names), cfg.params,
                              cfg.buff_dim, cfg.n_overlapped,
                              class_pairs=class_pairs)
        reports = [engine.push(b) for b in buffers]
    write_reports_csv(args.out, reports, names)
    print(f"wrote {args.out} ({len(reports)} buffers)")
    return 0


_COMPOSED_CONFIG = """\
[dataset]
series = 2
classes = COMPOSITE, MAIN, MINOR, NOISE, REFERENCE

[coincidence]
mode = fixed
tau = 5

[stream]
buff_dim = 25
n_overlapped = 0
"""

_SEQUENCES_CONFIG = """\
[dataset]
series = 2
classes = E1, E2, E3

[coincidence]
mode = fixed
tau = 20
iei = inf

[sequence.SEQ]
elements = E1, E2, E3

[stream]
buff_dim = 10
n_overlapped = 0
"""


def cmd_synth(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.example == "composed":
        ex = fixtures.composed_example(seed=args.seed)
        write_signal_csv(out / "composite.csv", ex.composite)
        for name, sig in ex.components.items():
            write_signal_csv(out / f"{name}.csv", sig)
        write_signal_csv(out / "reference.csv", ex.reference)
        write_events_csv(out / "events.csv", ex.dataset, ex.class_names)
        (out / "composed.cfg").write_text(_COMPOSED_CONFIG)
    else:
        ex = fixtures.sequences_example()
        coded = ex.class_coded()
        for n in range(coded.shape[0]):
            write_signal_csv(out / f"ts{n + 1}.csv",
                             Signal(coded[n].astype(float)))
        write_events_csv(out / "events.csv", ex.dataset, ex.class_names)
        (out / "sequences.cfg").write_text(_SEQUENCES_CONFIG)
    print(f"wrote fixture files to {out}")
    return 0


def cmd_baseline(args) -> int:
    # The baseline is defined for exactly two series and one event class.
    import csv as _csv

    times: dict[int, list[int]] = {0: [], 1: []}
    classes = set()
    with open(args.events, newline="") as fh:
        reader = _csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["time", "series",
                                                             "class"]:
            raise DataFormatError("expected header 'time,series,class'", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                t, series = int(row[0]), int(row[1])
            except (IndexError, ValueError):
                raise DataFormatError(f"bad row {row!r}", line=lineno) from None
            if series not in (0, 1):
                raise DataFormatError("baseline needs series indices 0 and 1",
                                      line=lineno)
            classes.add(row[2].strip())
            times[series].append(t)
    if len(classes) != 1:
        raise DataFormatError(
            f"baseline needs exactly one event class, got {sorted(classes)}")
    q_tau = quiroga_es(times[0], times[1], args.tau)
    dataset = validate_dataset(
        [(t, s, 0) for s in (0, 1) for t in times[s]], 2, 1)
    s = pairwise_sync(dataset, 0, 1, 0, 0, CoincidenceParams.fixed(args.tau))
    print(f"q_tau={q_tau!r}  (classical index; may exceed 1)")
    print(f"pairwise_sync={s!r}  (class-based index in [0, 1])")
    return 0


def cmd_bench(args) -> int:
    rng = np.random.default_rng(args.seed)
    shape = (args.k_classes, args.n_series, args.merg_dim)
    buffer = rng.random(shape) < args.density
    times_s = []
    for _ in range(args.repeats):
        engine = StreamEngine(args.n_series, args.k_classes,
                              CoincidenceParams.fixed(args.tau),
                              buff_dim=args.merg_dim)
        t0 = time.perf_counter()
        engine.push(buffer)
        times_s.append(time.perf_counter() - t0)
    mean = float(np.mean(times_s))
    std = float(np.std(times_s))
    row = (f"{args.n_series},{args.k_classes},{args.merg_dim},"
           f"{args.density},{args.repeats},{mean:.4f},{std:.4f}")
    header = "n_series,k_classes,merg_dim,density,repeats,mean_s,std_s"
    if args.out:
        Path(args.out).write_text(header + "\n" + row + "\n")
        print(f"wrote {args.out}")
    print(header)
    print(row)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eventsync",
        description="Synchronization analysis for classed event streams.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--events", required=True, help="event CSV file")
        p.add_argument("--config", required=True, help="run config (INI)")
        p.add_argument("--out", required=True, help="report CSV to write")
        p.add_argument("--tau", type=float, default=None,
                       help="override the global coincidence window")
        p.add_argument("--iei", default=None,
                       help="override the inter-event interval ('inf' allowed)")
        p.add_argument("--no-inter", action="store_true",
                       help="skip inter-class indices")

    p = sub.add_parser("analyze", help="batch analysis of an event file")
    add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("stream", help="buffered streaming analysis")
    add_common(p)
    p.add_argument("--buff-dim", type=int, default=None)
    p.add_argument("--n-overlapped", type=int, default=None)
    p.add_argument("--duration", type=int, default=None,
                   help="total stream length in samples")
    p.set_defaults(func=cmd_stream)

    p = sub.add_parser("synth", help="write a shipped example fixture")
    p.add_argument("--example", choices=("composed", "sequences"),
                   required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("baseline",
                       help="classical two-series event synchronization")
    p.add_argument("--events", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("bench", help="time the stream kernel on dense input")
    p.add_argument("--n-series", type=int, default=2)
    p.add_argument("--k-classes", type=int, default=4)
    p.add_argument("--merg-dim", type=int, default=10000)
    p.add_argument("--density", type=float, default=1.0)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--tau", type=float, default=50.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EventSyncError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
