"""Per-second volatility statistics and original-vs-simulated fidelity reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .errors import ConfigError, UndefinedCorrelationError
from .model import SimulatedStream, StreamSegment


@dataclass(slots=True)
class PerSecondHistogram:
    """Event counts per second over a fixed range, optionally with byte totals."""

    range_seconds: int
    counts: list[int]
    byte_counts: list[int] | None = None


@dataclass(slots=True)
class VolatilityStats:
    """Average, population variance, and its square root for a count series."""

    average: float
    variance: float
    standard_variance: float


def histogram(
    second_indices: Iterable[int],
    range_seconds: int,
    sizes: Iterable[int] | None = None,
) -> PerSecondHistogram:
    """Count events per second index; sizes, when given, accumulate bytes too.

    An index outside [0, range) is an internal invariant violation upstream,
    not a data error, so it raises ValueError.
    """
    if range_seconds < 1:
        raise ValueError(f"histogram range must be >= 1, got {range_seconds}")
    counts = [0] * range_seconds
    byte_counts: list[int] | None = None
    if sizes is None:
        for idx in second_indices:
            if not 0 <= idx < range_seconds:
                raise ValueError(
                    f"second index {idx} outside [0, {range_seconds}): upstream bug"
                )
            counts[idx] += 1
    else:
        byte_counts = [0] * range_seconds
        for idx, size in zip(second_indices, sizes):
            if not 0 <= idx < range_seconds:
                raise ValueError(
                    f"second index {idx} outside [0, {range_seconds}): upstream bug"
                )
            counts[idx] += 1
            byte_counts[idx] += size
    return PerSecondHistogram(range_seconds, counts, byte_counts)


def _framed_size(payload: bytes) -> int:
    # one byte of newline framing per record, matching sink accounting
    return len(payload) + 1


def segment_histogram(segment: StreamSegment, include_bytes: bool = False) -> PerSecondHistogram:
    """Histogram a segment at 1 s resolution over its declared span."""
    observed = segment.t_max - segment.t_min + 1
    if segment.span_seconds < observed:
        raise ConfigError(
            f"declared span {segment.span_seconds}s is shorter than the observed "
            f"range {observed}s; re-ingest with a span of at least {observed}"
        )
    indices = (e.t - segment.t_min for e in segment.events)
    sizes = (_framed_size(e.payload) for e in segment.events) if include_bytes else None
    return histogram(indices, segment.span_seconds, sizes)


def stream_histogram(stream: SimulatedStream, include_bytes: bool = False) -> PerSecondHistogram:
    """Histogram a simulated stream by scale stamp over its window."""
    indices = (e.scale_stamp for e in stream.events)
    sizes = (_framed_size(e.payload) for e in stream.events) if include_bytes else None
    return histogram(indices, stream.window_seconds, sizes)


def volatility(hist: PerSecondHistogram) -> VolatilityStats:
    """Average and population variance (divisor = range) of per-second counts."""
    r = hist.range_seconds
    if r < 1:
        raise ValueError(f"volatility needs range >= 1, got {r}")
    average = sum(hist.counts) / r
    variance = sum((q - average) ** 2 for q in hist.counts) / r
    return VolatilityStats(average, variance, math.sqrt(variance))


def _block_average(series: Sequence[int], points: int) -> list[float]:
    n = len(series)
    out = []
    for j in range(points):
        lo = j * n // points
        hi = (j + 1) * n // points
        out.append(sum(series[lo:hi]) / (hi - lo))
    return out


def _pearson(x: Sequence[float], y: Sequence[float]) -> float:
    n = len(x)
    mean_x = sum(x) / n
    mean_y = sum(y) / n
    cov = sum((a - mean_x) * (b - mean_y) for a, b in zip(x, y))
    var_x = sum((a - mean_x) ** 2 for a in x)
    var_y = sum((b - mean_y) ** 2 for b in y)
    if var_x == 0.0 or var_y == 0.0:
        raise UndefinedCorrelationError("correlation undefined for a constant series")
    return cov / math.sqrt(var_x * var_y)


def bytes_trend_correlation(
    original: PerSecondHistogram, simulated: PerSecondHistogram
) -> float:
    """Pearson correlation of bytes-per-second trends.

    The original series is block-averaged down to the simulated window's
    resolution first. Both histograms must carry byte totals.
    """
    if original.byte_counts is None or simulated.byte_counts is None:
        raise ValueError("bytes_trend_correlation requires byte-carrying histograms")
    points = simulated.range_seconds
    if original.range_seconds < points:
        raise ConfigError(
            f"original range {original.range_seconds} shorter than simulated {points}"
        )
    reference = _block_average(original.byte_counts, points)
    return _pearson(reference, [float(b) for b in simulated.byte_counts])


@dataclass(slots=True)
class FidelityRow:
    """One volatility row of the original-vs-simulated comparison."""

    label: str
    time_range_seconds: int
    stats: VolatilityStats
    abs_delta: dict[str, float] | None = None
    rel_delta: dict[str, float | None] | None = None
    bytes_correlation: float | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "label": self.label,
            "time_range_seconds": self.time_range_seconds,
            "average": self.stats.average,
            "variance": self.stats.variance,
            "standard_variance": self.stats.standard_variance,
        }
        if self.abs_delta is not None:
            out["abs_delta"] = self.abs_delta
        if self.rel_delta is not None:
            out["rel_delta"] = self.rel_delta
        if self.bytes_correlation is not None:
            out["bytes_correlation"] = self.bytes_correlation
        return out


@dataclass(slots=True)
class FidelityReport:
    """Volatility of the original segment versus each simulated stream."""

    segment_id: str
    original: FidelityRow
    simulated: list[FidelityRow] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "segment_id": self.segment_id,
            "original": self.original.to_dict(),
            "simulated": [row.to_dict() for row in self.simulated],
        }


def _deltas(sim: VolatilityStats, orig: VolatilityStats) -> tuple[dict[str, float], dict[str, float | None]]:
    pairs = {
        "average": (sim.average, orig.average),
        "variance": (sim.variance, orig.variance),
        "standard_variance": (sim.standard_variance, orig.standard_variance),
    }
    abs_delta = {name: abs(s - o) for name, (s, o) in pairs.items()}
    rel_delta: dict[str, float | None] = {
        name: (abs(s - o) / o if o != 0 else None) for name, (s, o) in pairs.items()
    }
    return abs_delta, rel_delta


def fidelity(segment: StreamSegment, streams: Sequence[SimulatedStream]) -> FidelityReport:
    """Compare per-second volatility of a segment against streams derived from it."""
    for stream in streams:
        if stream.source_segment_id != segment.segment_id:
            raise ConfigError(
                f"stream {stream.stream_id!r} derives from "
                f"{stream.source_segment_id!r}, not {segment.segment_id!r}"
            )
    orig_hist = segment_histogram(segment, include_bytes=True)
    orig_stats = volatility(orig_hist)
    report = FidelityReport(
        segment_id=segment.segment_id,
        original=FidelityRow("original", segment.span_seconds, orig_stats),
    )
    for stream in streams:
        sim_hist = stream_histogram(stream, include_bytes=True)
        sim_stats = volatility(sim_hist)
        abs_delta, rel_delta = _deltas(sim_stats, orig_stats)
        try:
            correlation = bytes_trend_correlation(orig_hist, sim_hist)
        except UndefinedCorrelationError:
            correlation = None
        report.simulated.append(
            FidelityRow(
                stream.stream_id,
                stream.window_seconds,
                sim_stats,
                abs_delta=abs_delta,
                rel_delta=rel_delta,
                bytes_correlation=correlation,
            )
        )
    return report


def format_volatility_table(rows: Sequence[tuple[int, VolatilityStats]]) -> str:
    """Render (time range, stats) rows as an aligned four-column table."""
    header = f"{'Time Range (s)':>14}  {'Average':>12}  {'Variance':>14}  {'Standard Variance':>18}"
    lines = [header]
    for time_range, stats in rows:
        lines.append(
            f"{time_range:>14}  {stats.average:>12.2f}  {stats.variance:>14.2f}  {stats.standard_variance:>18.2f}"
        )
    return "\n".join(lines)


def format_fidelity_table(report: FidelityReport) -> str:
    """Render a fidelity report in the aligned four-column layout."""
    rows = [(report.original.time_range_seconds, report.original.stats)]
    rows += [(row.time_range_seconds, row.stats) for row in report.simulated]
    return format_volatility_table(rows)
