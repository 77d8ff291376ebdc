"""Core data model: events, bounded segments, and compressed streams."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

from .errors import ConfigError


@dataclass(slots=True)
class Event:
    """One stream record: an opaque payload stamped with UTC epoch seconds.

    The payload is exactly one record; the newline record terminator is
    never part of it.
    """

    t: int
    payload: bytes

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ValueError(f"event timestamp must be >= 0, got {self.t}")
        if b"\n" in self.payload:
            raise ValueError("event payload must not contain a newline")


@dataclass(slots=True)
class StreamSegment:
    """A bounded, chronologically ordered slice of a stream.

    span_seconds is the declared extent of the original stream (e.g. a full
    day), which may exceed the observed t_max - t_min + 1.
    """

    segment_id: str
    events: list[Event]
    t_min: int
    t_max: int
    count: int
    span_seconds: int
    config: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_events(
        cls,
        segment_id: str,
        events: Iterable[Event],
        *,
        span_seconds: int | None = None,
        config: dict[str, Any] | None = None,
    ) -> StreamSegment:
        """Build a segment from unordered events; the sort is stable on t."""
        ordered = sorted(events, key=lambda e: e.t)
        if not ordered:
            raise ConfigError("a segment requires at least one event")
        t_min, t_max = ordered[0].t, ordered[-1].t
        if span_seconds is None:
            span_seconds = t_max - t_min + 1
        if span_seconds < 1:
            raise ConfigError(f"span_seconds must be >= 1, got {span_seconds}")
        return cls(
            segment_id=segment_id,
            events=ordered,
            t_min=t_min,
            t_max=t_max,
            count=len(ordered),
            span_seconds=span_seconds,
            config=dict(config or {}),
        )


@dataclass(slots=True)
class ScaledEvent:
    """An event mapped onto the compressed time axis.

    scale_stamp is the integer second bucket in [0, window); t_original and
    payload are carried through untouched.
    """

    scale_stamp: int
    t_original: int
    payload: bytes


@dataclass(slots=True)
class SimulatedStream:
    """A compressed stream: scaled events thinned by the compression multiple."""

    stream_id: str
    window_seconds: int
    multiple: Fraction
    events: list[ScaledEvent]
    source_segment_id: str
    config: dict[str, Any] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.events)
