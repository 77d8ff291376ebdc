"""Time-axis compression: scale event times into a target window, then thin
each one-second bucket by the compression multiple.

The multiple (source span / window) is carried as an exact rational so
per-bucket keep counts never suffer float rounding.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import ConfigError
from .model import ScaledEvent, SimulatedStream, StreamSegment

MODE_SYSTEMATIC = "systematic"
MODE_PREFIX = "prefix"


def _scale_stamps(segment: StreamSegment, window_seconds: int) -> list[int]:
    # floor of the affine map onto [0, window); only t == t_max hits the top
    # and is clamped into the last bucket.
    t_min = segment.t_min
    denom = segment.t_max - t_min
    if denom == 0:
        return [0] * segment.count
    top = window_seconds - 1
    return [min((e.t - t_min) * window_seconds // denom, top) for e in segment.events]


def normalize(segment: StreamSegment, window_seconds: int) -> list[ScaledEvent]:
    """Map a segment's events onto integer buckets [0, window), order preserved."""
    if window_seconds < 1:
        raise ConfigError(f"window must be >= 1 second, got {window_seconds}")
    stamps = _scale_stamps(segment, window_seconds)
    return [
        ScaledEvent(stamp, e.t, e.payload)
        for stamp, e in zip(stamps, segment.events)
    ]


def _keep_count(bucket_size: int, multiple: Fraction) -> int:
    # round half to even on the exact rational
    return round(bucket_size / multiple)


def sample(
    scaled: Sequence[ScaledEvent],
    multiple: Fraction | int,
    mode: str = MODE_SYSTEMATIC,
) -> list[ScaledEvent]:
    """Thin each bucket of size m down to k = round(m / multiple) events.

    systematic keeps the evenly spaced offsets floor(j * multiple) for
    j = 0..k-1; prefix keeps the first k. k may be zero, emptying the
    bucket. Input must be bucket-ordered; order is preserved.
    """
    multiple = Fraction(multiple)
    if multiple < 1:
        raise ConfigError(
            f"multiple {multiple} < 1: the target window exceeds the source span"
        )
    if mode not in (MODE_SYSTEMATIC, MODE_PREFIX):
        raise ConfigError(f"unknown sampling mode {mode!r}")
    if multiple == 1:
        return list(scaled)
    num, den = multiple.numerator, multiple.denominator
    out: list[ScaledEvent] = []
    i, n = 0, len(scaled)
    while i < n:
        stamp = scaled[i].scale_stamp
        j = i + 1
        while j < n and scaled[j].scale_stamp == stamp:
            j += 1
        k = _keep_count(j - i, multiple)
        if mode == MODE_PREFIX:
            out.extend(scaled[i : i + k])
        else:
            out.extend(scaled[i + (q * num) // den] for q in range(k))
        i = j
    return out


def simulate(
    segment: StreamSegment,
    window_seconds: int,
    mode: str = MODE_SYSTEMATIC,
    *,
    stream_id: str,
) -> SimulatedStream:
    """Compress a segment into a window: scale the time axis, thin by span/window.

    Equivalent to sample(normalize(segment, window), span/window, mode) but
    only materializes the kept events. Deterministic in all arguments.
    """
    if window_seconds < 1:
        raise ConfigError(f"window must be >= 1 second, got {window_seconds}")
    if window_seconds > segment.span_seconds:
        raise ConfigError(
            f"window {window_seconds}s exceeds the source span "
            f"{segment.span_seconds}s; that would upsample the stream"
        )
    if mode not in (MODE_SYSTEMATIC, MODE_PREFIX):
        raise ConfigError(f"unknown sampling mode {mode!r}")
    multiple = Fraction(segment.span_seconds, window_seconds)
    num, den = multiple.numerator, multiple.denominator
    events = segment.events
    stamps = _scale_stamps(segment, window_seconds)
    kept: list[ScaledEvent] = []
    i, n = 0, len(stamps)
    while i < n:
        stamp = stamps[i]
        j = i + 1
        while j < n and stamps[j] == stamp:
            j += 1
        k = _keep_count(j - i, multiple)
        if mode == MODE_PREFIX:
            picks = range(i, i + k)
        else:
            picks = (i + (q * num) // den for q in range(k))
        for idx in picks:
            e = events[idx]
            kept.append(ScaledEvent(stamp, e.t, e.payload))
        i = j
    config = {
        "source_segment_id": segment.segment_id,
        "source_span_seconds": segment.span_seconds,
        "source_count": segment.count,
        "window_seconds": window_seconds,
        "mode": mode,
        "multiple": str(multiple),
    }
    return SimulatedStream(
        stream_id=stream_id,
        window_seconds=window_seconds,
        multiple=multiple,
        events=kept,
        source_segment_id=segment.segment_id,
        config=config,
    )
