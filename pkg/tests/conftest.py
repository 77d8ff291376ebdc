from __future__ import annotations

import socket
import threading

import pytest
from hypothesis import settings

from chronoflow.model import Event, StreamSegment

settings.register_profile("chronoflow", deadline=None)
settings.load_profile("chronoflow")


def make_segment(
    times: list[int],
    *,
    segment_id: str = "seg",
    span: int | None = None,
) -> StreamSegment:
    """Segment whose payloads are tagged with the input index, for order checks."""
    events = [Event(t, b"%d:%d" % (i, t)) for i, t in enumerate(times)]
    return StreamSegment.from_events(segment_id, events, span_seconds=span)


class RecordingServer(threading.Thread):
    """Accepts one TCP connection and records every byte until EOF."""

    def __init__(self) -> None:
        super().__init__(daemon=True)
        self.sock = socket.socket()
        self.sock.settimeout(30.0)
        self.sock.bind(("127.0.0.1", 0))
        self.sock.listen(1)
        self.port: int = self.sock.getsockname()[1]
        self.received = b""

    def run(self) -> None:
        conn, _ = self.sock.accept()
        conn.settimeout(30.0)
        with conn:
            while True:
                chunk = conn.recv(65536)
                if not chunk:
                    return
                self.received += chunk


@pytest.fixture
def recording_server():
    server = RecordingServer()
    server.start()
    yield server
    server.sock.close()
