"""chronoflow: compress day-scale event streams into short windows and replay
them in real time, with volatility metrics proving the compression kept the
original stream's statistical character."""

from .errors import (
    ChronoflowError,
    ConfigError,
    CorruptionError,
    DuplicateIdError,
    EmptyInputError,
    KindMismatchError,
    NotFoundError,
    ParseError,
    SinkError,
    StoreError,
    TimeRangeError,
    UndefinedCorrelationError,
)
from .ingest import RecordSchema, TimeFieldSpec, generate_synthetic, ingest, parse_time
from .metrics import (
    FidelityReport,
    PerSecondHistogram,
    VolatilityStats,
    bytes_trend_correlation,
    fidelity,
    histogram,
    volatility,
)
from .model import Event, ScaledEvent, SimulatedStream, StreamSegment
from .replay import (
    MonotonicClock,
    ReplayReport,
    Sink,
    VirtualClock,
    load,
    open_sink,
    replay,
)
from .store import Store, resolve_root
from .transform import normalize, sample, simulate

__version__ = "0.1.0"

__all__ = [
    "ChronoflowError",
    "ConfigError",
    "CorruptionError",
    "DuplicateIdError",
    "EmptyInputError",
    "Event",
    "FidelityReport",
    "KindMismatchError",
    "MonotonicClock",
    "NotFoundError",
    "ParseError",
    "PerSecondHistogram",
    "RecordSchema",
    "ReplayReport",
    "ScaledEvent",
    "SimulatedStream",
    "Sink",
    "SinkError",
    "Store",
    "StoreError",
    "StreamSegment",
    "TimeFieldSpec",
    "TimeRangeError",
    "UndefinedCorrelationError",
    "VirtualClock",
    "VolatilityStats",
    "bytes_trend_correlation",
    "fidelity",
    "generate_synthetic",
    "histogram",
    "ingest",
    "load",
    "normalize",
    "open_sink",
    "parse_time",
    "replay",
    "resolve_root",
    "sample",
    "simulate",
    "volatility",
]
