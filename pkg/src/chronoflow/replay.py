"""Paced re-emission of a compressed stream: one bucket per second.

Scheduling is absolute: tick i's deadline is start + i on the monotonic
clock, so a slow emission delays later ticks but never shifts their
deadlines, and lateness cannot accumulate.
"""

from __future__ import annotations

import json
import socket
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, BinaryIO, Sequence

from .errors import ConfigError, SinkError
from .model import SimulatedStream
from .store import Store

SINK_STDOUT = "stdout"
SINK_FILE_PREFIX = "file:"
SINK_TCP_PREFIX = "tcp:"
SINK_BROKER_PREFIX = "broker:"


class MonotonicClock:
    """Wall-clock pacing backed by time.monotonic."""

    def now(self) -> float:
        return time.monotonic()

    def sleep_until(self, deadline: float) -> None:
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return
            time.sleep(remaining)


class VirtualClock:
    """Instantly advancing clock so replays can be tested without waiting."""

    def __init__(self, start: float = 0.0) -> None:
        self._now = start

    def now(self) -> float:
        return self._now

    def sleep_until(self, deadline: float) -> None:
        if deadline > self._now:
            self._now = deadline


class Sink:
    """Destination for replayed records; emit frames each record with LF.

    Subclasses implement _write (and open/close as needed); bytes_emitted
    counts exactly what _write was handed.
    """

    def __init__(self) -> None:
        self.bytes_emitted = 0

    def open(self) -> None:
        pass

    def close(self) -> None:
        pass

    def emit(self, batch: Sequence[bytes]) -> int:
        data = b"".join(payload + b"\n" for payload in batch)
        self._write(data)
        self.bytes_emitted += len(data)
        return len(data)

    def _write(self, data: bytes) -> None:
        raise NotImplementedError


class StdoutSink(Sink):
    """Write records to standard output, flushed per bucket."""

    def _write(self, data: bytes) -> None:
        stream: BinaryIO = sys.stdout.buffer
        stream.write(data)
        stream.flush()


class FileSink(Sink):
    """Append records to a file."""

    def __init__(self, path: str | Path) -> None:
        super().__init__()
        self.path = Path(path)
        self._fh: BinaryIO | None = None

    def open(self) -> None:
        try:
            self._fh = open(self.path, "ab")
        except OSError as exc:
            raise SinkError(f"cannot open {self.path}: {exc}") from exc

    def _write(self, data: bytes) -> None:
        if self._fh is None:
            raise SinkError("file sink is not open")
        self._fh.write(data)

    def close(self) -> None:
        if self._fh is not None:
            self._fh.flush()
            self._fh.close()
            self._fh = None


class TcpSink(Sink):
    """Stream records over a TCP connection, one line per record."""

    def __init__(self, host: str, port: int) -> None:
        super().__init__()
        self.host = host
        self.port = port
        self._sock: socket.socket | None = None

    def open(self) -> None:
        try:
            self._sock = socket.create_connection((self.host, self.port), timeout=10.0)
        except OSError as exc:
            raise SinkError(f"cannot connect to {self.host}:{self.port}: {exc}") from exc

    def _write(self, data: bytes) -> None:
        if self._sock is None:
            raise SinkError("tcp sink is not open")
        try:
            self._sock.sendall(data)
        except OSError as exc:
            raise SinkError(f"send to {self.host}:{self.port} failed: {exc}") from exc

    def close(self) -> None:
        if self._sock is not None:
            try:
                self._sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            self._sock.close()
            self._sock = None


def open_sink(spec: str) -> Sink:
    """Build a sink from `stdout | file:PATH | tcp:HOST:PORT`.

    The returned sink is not yet opened; broker: is a reserved extension
    point with no implementation here.
    """
    if spec == SINK_STDOUT:
        return StdoutSink()
    if spec.startswith(SINK_FILE_PREFIX):
        path = spec[len(SINK_FILE_PREFIX):]
        if not path:
            raise ConfigError("file sink needs a path: file:PATH")
        return FileSink(path)
    if spec.startswith(SINK_TCP_PREFIX):
        rest = spec[len(SINK_TCP_PREFIX):]
        host, sep, port_text = rest.rpartition(":")
        if not sep or not host:
            raise ConfigError("tcp sink needs tcp:HOST:PORT")
        try:
            port = int(port_text)
        except ValueError:
            raise ConfigError(f"tcp port {port_text!r} is not an integer") from None
        return TcpSink(host, port)
    if spec.startswith(SINK_BROKER_PREFIX):
        raise ConfigError("broker: sinks are a reserved extension point, not implemented")
    raise ConfigError(f"unknown sink spec {spec!r}; expected stdout | file:PATH | tcp:HOST:PORT")


def bucket_payloads(stream: SimulatedStream) -> list[list[bytes]]:
    """Group a stream's payloads by scale stamp into window_seconds buckets."""
    buckets: list[list[bytes]] = [[] for _ in range(stream.window_seconds)]
    for event in stream.events:
        buckets[event.scale_stamp].append(event.payload)
    return buckets


def load(store: Store, stream_id: str, window_seconds: int | None = None) -> list[list[bytes]]:
    """Load a stored stream as per-second buckets of payloads.

    window_seconds, when given, must match the stored window; empty buckets
    are present as empty lists.
    """
    stream = store.read_stream(stream_id)
    if window_seconds is not None and window_seconds != stream.window_seconds:
        raise ConfigError(
            f"stream {stream_id!r} was compressed to {stream.window_seconds}s, "
            f"not {window_seconds}s"
        )
    return bucket_payloads(stream)


@dataclass(slots=True)
class TickRecord:
    """Emission record for one scheduled second."""

    tick: int
    events_emitted: int
    bytes_emitted: int
    lateness_ms: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "tick": self.tick,
            "events_emitted": self.events_emitted,
            "bytes_emitted": self.bytes_emitted,
            "lateness_ms": self.lateness_ms,
        }


@dataclass(slots=True)
class ReplayReport:
    """Outcome of a replay run: 0 is success, 1 is fault."""

    status: int
    window_seconds: int
    ticks: list[TickRecord] = field(default_factory=list)
    total_events: int = 0
    total_bytes: int = 0
    wall_time_seconds: float = 0.0
    last_completed_tick: int = -1
    error: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "window_seconds": self.window_seconds,
            "total_events": self.total_events,
            "total_bytes": self.total_bytes,
            "wall_time_seconds": self.wall_time_seconds,
            "last_completed_tick": self.last_completed_tick,
            "error": self.error,
            "ticks": [t.to_dict() for t in self.ticks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def replay(
    buckets: Sequence[Sequence[bytes]],
    sink: Sink,
    clock: MonotonicClock | VirtualClock | None = None,
) -> ReplayReport:
    """Emit one bucket per second against absolute deadlines.

    Bucket i is sent no earlier than start + i; empty buckets still get a
    tick record but no emit call. A sink or clock failure stops the run at
    the failing tick with status 1.
    """
    if clock is None:
        clock = MonotonicClock()
    report = ReplayReport(status=0, window_seconds=len(buckets))
    start = clock.now()
    for i, bucket in enumerate(buckets):
        deadline = start + i
        try:
            clock.sleep_until(deadline)
            begin = clock.now()
            nbytes = sink.emit(bucket) if bucket else 0
        except Exception as exc:
            report.status = 1
            report.error = f"{type(exc).__name__}: {exc}"
            break
        report.ticks.append(TickRecord(i, len(bucket), nbytes, (begin - deadline) * 1000.0))
        report.total_events += len(bucket)
        report.total_bytes += nbytes
        report.last_completed_tick = i
    report.wall_time_seconds = clock.now() - start
    return report
