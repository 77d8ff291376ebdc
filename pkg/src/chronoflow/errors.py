"""Exception types shared across the package.

Everything operational derives from ChronoflowError so the CLI can map
failures to a single exit code; usage errors are argparse's business.
"""

from __future__ import annotations


class ChronoflowError(Exception):
    """Base class for operational failures (CLI exit code 1)."""


class ConfigError(ChronoflowError):
    """Invalid parameter value or parameter combination."""


class ParseError(ChronoflowError):
    """A record's time field could not be decoded."""

    def __init__(self, message: str, *, field: str | None = None, line_number: int | None = None) -> None:
        self.field = field
        self.line_number = line_number
        prefix = []
        if line_number is not None:
            prefix.append(f"line {line_number}")
        if field is not None:
            prefix.append(f"field {field!r}")
        super().__init__(f"{': '.join(prefix) + ': ' if prefix else ''}{message}")


class TimeRangeError(ParseError):
    """A time value parsed but falls outside the representable range."""


class EmptyInputError(ChronoflowError):
    """No record in the input could be ingested."""


class StoreError(ChronoflowError):
    """Base class for artifact store failures."""


class NotFoundError(StoreError):
    """No artifact is stored under the requested id."""


class DuplicateIdError(StoreError):
    """An artifact already exists under the requested id."""


class KindMismatchError(StoreError):
    """The stored artifact is of a different kind than requested."""


class CorruptionError(StoreError):
    """Stored data does not match its manifest (missing file or bad digest)."""


class SinkError(ChronoflowError):
    """A sink could not be opened or refused an emission."""


class UndefinedCorrelationError(ChronoflowError):
    """Correlation is undefined because a series has zero variance."""
