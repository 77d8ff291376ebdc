"""Command-line front end: generate, ingest, simulate, replay, stats, report, list.

Exit codes: 0 success, 1 operational fault, 2 usage error. Operational
errors go to stderr as one-line JSON so callers can parse them.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path
from typing import Sequence

from . import metrics, transform
from .errors import ChronoflowError
from .ingest import (
    FORMAT_EPOCH_MILLIS,
    FORMAT_EPOCH_SECONDS,
    FORMAT_PATTERN,
    RecordSchema,
    TimeFieldSpec,
    generate_synthetic,
    ingest as ingest_records,
    iter_records,
)
from .replay import (
    MonotonicClock,
    VirtualClock,
    bucket_payloads,
    open_sink,
    replay as run_replay,
)
from .store import Store, resolve_root

_TZ_RE = re.compile(r"^([+-])(\d{2}):(\d{2})$")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _seconds_span(text: str) -> int:
    return _positive_int(text)


def _amplitude(text: str) -> float:
    value = float(text)
    if not 0.0 <= value < 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0, 1), got {text}")
    return value


def _rate(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _tz_minutes(text: str) -> int:
    match = _TZ_RE.match(text)
    if not match:
        raise argparse.ArgumentTypeError(f"timezone must look like +08:00, got {text!r}")
    sign = 1 if match.group(1) == "+" else -1
    minutes = int(match.group(2)) * 60 + int(match.group(3))
    if minutes > 14 * 60:
        raise argparse.ArgumentTypeError(f"timezone offset {text} outside +/-14:00")
    return sign * minutes


def _delimiter(text: str) -> bytes:
    decoded = text.encode("utf-8").decode("unicode_escape")
    raw = decoded.encode("latin-1")
    if len(raw) != 1:
        raise argparse.ArgumentTypeError(f"delimiter must be one byte, got {text!r}")
    return raw


def _time_field(text: str) -> int | str:
    return int(text) if text.isdigit() else text


def _time_format(text: str) -> tuple[str, str | None]:
    if text == "epoch":
        return FORMAT_EPOCH_SECONDS, None
    if text == "epoch-ms":
        return FORMAT_EPOCH_MILLIS, None
    if text.startswith("pattern:"):
        return FORMAT_PATTERN, text[len("pattern:"):]
    raise argparse.ArgumentTypeError(
        f"time format must be epoch | epoch-ms | pattern:STR, got {text!r}"
    )


def _fail(exc: ChronoflowError) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
    return 1


def _store(args: argparse.Namespace) -> Store:
    return Store(resolve_root(args.store))


def cmd_generate(args: argparse.Namespace) -> int:
    segment = generate_synthetic(
        args.span, args.rate, args.amplitude, args.seed, segment_id=args.out
    )
    _store(args).write_segment(segment)
    print(f"segment {segment.segment_id}: {segment.count} events over {segment.span_seconds}s")
    return 0


def cmd_ingest(args: argparse.Namespace) -> int:
    fmt, pattern = args.time_format
    schema = RecordSchema(
        time_field=TimeFieldSpec(
            field_selector=args.time_field,
            format=fmt,
            pattern=pattern,
            tz_offset_minutes=args.tz,
        ),
        delimiter=args.delimiter,
    )
    rejects_path = Path(f"{args.out}.rejects")
    segment = ingest_records(
        iter_records(args.input),
        schema,
        segment_id=args.out,
        declared_span=args.span,
        rejects_path=rejects_path,
    )
    _store(args).write_segment(segment)
    rejected = segment.config.get("rejected", 0)
    print(
        f"segment {segment.segment_id}: {segment.count} events parsed, "
        f"{rejected} rejected, span {segment.span_seconds}s"
    )
    if rejected:
        print(f"rejected records written to {rejects_path}", file=sys.stderr)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    store = _store(args)
    segment = store.read_segment(args.segment)
    stream = transform.simulate(segment, args.range, args.mode, stream_id=args.out)
    store.write_stream(stream)
    print(
        f"stream {stream.stream_id}: {stream.count} events in {stream.window_seconds}s "
        f"(multiple {stream.multiple})"
    )
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    store = _store(args)
    stream = store.read_stream(args.stream)
    buckets = bucket_payloads(stream)
    sink = open_sink(args.sink)
    clock = VirtualClock() if args.virtual_clock else MonotonicClock()
    sink.open()
    try:
        report = run_replay(buckets, sink, clock)
    finally:
        sink.close()
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n", encoding="utf-8")
    # stdout may be the sink itself, so the human summary goes to stderr
    print(
        f"replay {stream.stream_id}: status {report.status}, "
        f"{report.total_events} events / {report.total_bytes} bytes "
        f"in {report.wall_time_seconds:.3f}s",
        file=sys.stderr,
    )
    if report.error:
        print(f"replay error: {report.error}", file=sys.stderr)
    return report.status


def cmd_stats(args: argparse.Namespace) -> int:
    store = _store(args)
    if args.segment:
        segment = store.read_segment(args.segment)
        hist = metrics.segment_histogram(segment)
        time_range = segment.span_seconds
    else:
        stream = store.read_stream(args.stream)
        hist = metrics.stream_histogram(stream)
        time_range = stream.window_seconds
    print(metrics.format_volatility_table([(time_range, metrics.volatility(hist))]))
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    store = _store(args)
    segment = store.read_segment(args.segment)
    streams = [store.read_stream(stream_id) for stream_id in args.streams.split(",")]
    report = metrics.fidelity(segment, streams)
    Path(args.out).write_text(
        json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    print(metrics.format_fidelity_table(report))
    print(f"fidelity report written to {args.out}", file=sys.stderr)
    return 0


def cmd_list(args: argparse.Namespace) -> int:
    catalog = _store(args).catalog()
    for entry in catalog.entries:
        detail = " ".join(f"{k}={v}" for k, v in entry.detail.items())
        print(f"{entry.kind:<8} {entry.artifact_id:<24} {entry.count:>10}  {detail}")
    for problem in catalog.problems:
        print(json.dumps({"error": "CatalogProblem", "path": problem.path, "message": problem.message}), file=sys.stderr)
    return 0


def _add_store_flag(p: argparse.ArgumentParser) -> None:
    # SUPPRESS keeps a pre-subcommand --store from being clobbered by the default
    p.add_argument(
        "--store",
        default=argparse.SUPPRESS,
        help="store root directory (default: $CHRONO_STORE or ./store)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chronoflow",
        description="Compress timestamped event streams into short windows and replay them in real time.",
    )
    parser.add_argument("--store", default=None, help="store root directory (default: $CHRONO_STORE or ./store)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic diurnal segment")
    p.add_argument("--span", type=_seconds_span, required=True, help="original time range in seconds")
    p.add_argument("--rate", type=_rate, required=True, help="mean events per second")
    p.add_argument("--amplitude", type=_amplitude, default=0.0, help="diurnal amplitude in [0, 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="segment id to store under")
    _add_store_flag(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("ingest", help="parse a delimited log file into a segment")
    p.add_argument("--input", required=True, help="newline-delimited input file")
    p.add_argument("--delimiter", type=_delimiter, default=b"\t", help=r"field separator (default TAB; escapes like \t work)")
    p.add_argument("--time-field", type=_time_field, required=True, help="column index, or header name (implies a header row)")
    p.add_argument("--time-format", type=_time_format, default=("epoch_seconds", None), help="epoch | epoch-ms | pattern:STR")
    p.add_argument("--tz", type=_tz_minutes, default=0, help="zone of wall-clock stamps, e.g. +08:00")
    p.add_argument("--span", type=_seconds_span, default=None, help="declared original span in seconds")
    p.add_argument("--out", required=True, help="segment id to store under")
    _add_store_flag(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("simulate", help="compress a segment into a target window")
    p.add_argument("--segment", required=True)
    p.add_argument("--range", type=_positive_int, required=True, help="target window in seconds")
    p.add_argument("--mode", choices=[transform.MODE_SYSTEMATIC, transform.MODE_PREFIX], default=transform.MODE_SYSTEMATIC)
    p.add_argument("--out", required=True, help="stream id to store under")
    _add_store_flag(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replay", help="emit a stream to a sink, one bucket per second")
    p.add_argument("--stream", required=True)
    p.add_argument("--sink", required=True, help="stdout | file:PATH | tcp:HOST:PORT")
    p.add_argument("--virtual-clock", action="store_true", help="run without real waits")
    p.add_argument("--report", help="write the replay report JSON here")
    _add_store_flag(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("stats", help="print a volatility table for one artifact")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--stream")
    group.add_argument("--segment")
    _add_store_flag(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("report", help="compare original vs simulated volatility")
    p.add_argument("--segment", required=True)
    p.add_argument("--streams", required=True, help="comma-separated stream ids")
    p.add_argument("--out", required=True, help="write the report JSON here")
    _add_store_flag(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("list", help="list stored artifacts")
    _add_store_flag(p)
    p.set_defaults(func=cmd_list)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ChronoflowError as exc:
        return _fail(exc)


def entrypoint() -> None:
    try:
        status = main()
        sys.stdout.flush()
    except BrokenPipeError:
        # downstream closed the pipe; keep the interpreter from whining at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        status = 1
    raise SystemExit(status)
