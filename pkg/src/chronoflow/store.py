"""File-backed artifact store with digest-bearing manifests.

Layout is one directory per artifact, `<root>/<kind>/<id>/`, holding
`data.tsv` (UTF-8, LF line endings, TAB separators, payload last) and
`manifest.json` (config echo plus a sha256 of the data bytes). Writes go
through a temp directory and a rename, so readers never observe a partial
artifact and a crashed write never registers an id.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import shutil
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import (
    ConfigError,
    CorruptionError,
    DuplicateIdError,
    KindMismatchError,
    NotFoundError,
)
from .model import Event, ScaledEvent, SimulatedStream, StreamSegment

KIND_SEGMENT = "segment"
KIND_STREAM = "stream"

DATA_FILENAME = "data.tsv"
MANIFEST_FILENAME = "manifest.json"

STORE_ENV_VAR = "CHRONO_STORE"
DEFAULT_ROOT = "store"

_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


def resolve_root(explicit: str | os.PathLike[str] | None = None) -> Path:
    """Pick the store root: explicit flag, then CHRONO_STORE, then ./store."""
    if explicit is not None:
        return Path(explicit)
    env = os.environ.get(STORE_ENV_VAR)
    return Path(env) if env else Path(DEFAULT_ROOT)


def _check_id(artifact_id: str) -> None:
    if not _ID_RE.match(artifact_id):
        raise ConfigError(
            f"artifact id {artifact_id!r} is not path-safe "
            "(letters, digits, '.', '_', '-' only; must not start with '.')"
        )


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def segment_data_bytes(segment: StreamSegment) -> bytes:
    """Serialize segment events to the canonical `t<TAB>payload` lines."""
    return b"".join(b"%d\t%s\n" % (e.t, e.payload) for e in segment.events)


def stream_data_bytes(stream: SimulatedStream) -> bytes:
    """Serialize stream events to `scale_stamp<TAB>t_original<TAB>payload` lines."""
    return b"".join(
        b"%d\t%d\t%s\n" % (e.scale_stamp, e.t_original, e.payload)
        for e in stream.events
    )


@dataclass(slots=True)
class CatalogEntry:
    kind: str
    artifact_id: str
    count: int
    detail: dict[str, Any] = field(default_factory=dict)


@dataclass(slots=True)
class CatalogProblem:
    path: str
    message: str


@dataclass(slots=True)
class Catalog:
    entries: list[CatalogEntry] = field(default_factory=list)
    problems: list[CatalogProblem] = field(default_factory=list)


class Store:
    """Persist segments and simulated streams under a root directory."""

    def __init__(self, root: str | os.PathLike[str]) -> None:
        self.root = Path(root)

    def _artifact_dir(self, kind: str, artifact_id: str) -> Path:
        return self.root / kind / artifact_id

    def _write(self, kind: str, artifact_id: str, data: bytes, manifest: dict[str, Any]) -> Path:
        _check_id(artifact_id)
        final = self._artifact_dir(kind, artifact_id)
        if final.exists():
            raise DuplicateIdError(f"{kind} {artifact_id!r} already exists at {final}")
        final.parent.mkdir(parents=True, exist_ok=True)
        tmp = final.parent / f".tmp-{artifact_id}-{os.getpid()}"
        if tmp.exists():
            shutil.rmtree(tmp)
        tmp.mkdir()
        try:
            (tmp / DATA_FILENAME).write_bytes(data)
            manifest_bytes = (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode("utf-8")
            (tmp / MANIFEST_FILENAME).write_bytes(manifest_bytes)
            os.rename(tmp, final)
        except BaseException:
            shutil.rmtree(tmp, ignore_errors=True)
            raise
        return final

    def _read(self, kind: str, artifact_id: str) -> tuple[dict[str, Any], bytes]:
        final = self._artifact_dir(kind, artifact_id)
        if not final.is_dir():
            other = KIND_STREAM if kind == KIND_SEGMENT else KIND_SEGMENT
            if self._artifact_dir(other, artifact_id).is_dir():
                raise KindMismatchError(
                    f"{artifact_id!r} is stored as a {other}, not a {kind}"
                )
            raise NotFoundError(f"no {kind} stored under id {artifact_id!r}")
        manifest_path = final / MANIFEST_FILENAME
        data_path = final / DATA_FILENAME
        if not manifest_path.is_file() or not data_path.is_file():
            raise CorruptionError(f"{final} is missing its manifest or data file")
        try:
            manifest = json.loads(manifest_path.read_text("utf-8"))
        except ValueError as exc:
            raise CorruptionError(f"{manifest_path} is not valid JSON: {exc}") from exc
        if manifest.get("kind") != kind:
            raise KindMismatchError(
                f"{artifact_id!r} manifest declares kind {manifest.get('kind')!r}, expected {kind!r}"
            )
        data = data_path.read_bytes()
        if _digest(data) != manifest.get("digest"):
            raise CorruptionError(
                f"digest mismatch for {data_path}: stored data does not match its manifest"
            )
        return manifest, data

    def write_segment(self, segment: StreamSegment) -> Path:
        """Store a segment; duplicate ids are a conflict, never an overwrite."""
        data = segment_data_bytes(segment)
        manifest = {
            "kind": KIND_SEGMENT,
            "id": segment.segment_id,
            "count": segment.count,
            "t_min": segment.t_min,
            "t_max": segment.t_max,
            "span_seconds": segment.span_seconds,
            "config": segment.config,
            "digest": _digest(data),
        }
        return self._write(KIND_SEGMENT, segment.segment_id, data, manifest)

    def read_segment(self, segment_id: str) -> StreamSegment:
        manifest, data = self._read(KIND_SEGMENT, segment_id)
        events = []
        # split strictly on LF: payloads may contain CR, splitlines would eat it
        for line in data.split(b"\n")[:-1]:
            t_text, payload = line.split(b"\t", 1)
            events.append(Event(int(t_text), payload))
        if len(events) != manifest["count"]:
            raise CorruptionError(
                f"segment {segment_id!r} has {len(events)} records, manifest says {manifest['count']}"
            )
        return StreamSegment(
            segment_id=segment_id,
            events=events,
            t_min=manifest["t_min"],
            t_max=manifest["t_max"],
            count=manifest["count"],
            span_seconds=manifest["span_seconds"],
            config=manifest.get("config", {}),
        )

    def write_stream(self, stream: SimulatedStream) -> Path:
        """Store a simulated stream; data order is (scale_stamp, stored order)."""
        data = stream_data_bytes(stream)
        manifest = {
            "kind": KIND_STREAM,
            "id": stream.stream_id,
            "count": stream.count,
            "window_seconds": stream.window_seconds,
            "multiple": str(stream.multiple),
            "source_segment_id": stream.source_segment_id,
            "config": stream.config,
            "digest": _digest(data),
        }
        return self._write(KIND_STREAM, stream.stream_id, data, manifest)

    def read_stream(self, stream_id: str) -> SimulatedStream:
        manifest, data = self._read(KIND_STREAM, stream_id)
        events = []
        for line in data.split(b"\n")[:-1]:
            stamp_text, t_text, payload = line.split(b"\t", 2)
            events.append(ScaledEvent(int(stamp_text), int(t_text), payload))
        if len(events) != manifest["count"]:
            raise CorruptionError(
                f"stream {stream_id!r} has {len(events)} records, manifest says {manifest['count']}"
            )
        return SimulatedStream(
            stream_id=stream_id,
            window_seconds=manifest["window_seconds"],
            multiple=Fraction(manifest["multiple"]),
            events=events,
            source_segment_id=manifest["source_segment_id"],
            config=manifest.get("config", {}),
        )

    def catalog(self) -> Catalog:
        """List every stored artifact; unreadable manifests become per-entry problems."""
        result = Catalog()
        for kind in (KIND_SEGMENT, KIND_STREAM):
            kind_dir = self.root / kind
            if not kind_dir.is_dir():
                continue
            for child in sorted(kind_dir.iterdir()):
                if not child.is_dir() or child.name.startswith("."):
                    continue
                try:
                    manifest = json.loads((child / MANIFEST_FILENAME).read_text("utf-8"))
                    detail: dict[str, Any]
                    if kind == KIND_SEGMENT:
                        detail = {
                            "t_min": manifest["t_min"],
                            "t_max": manifest["t_max"],
                            "span_seconds": manifest["span_seconds"],
                        }
                    else:
                        detail = {
                            "window_seconds": manifest["window_seconds"],
                            "multiple": manifest["multiple"],
                            "source_segment_id": manifest["source_segment_id"],
                        }
                    result.entries.append(
                        CatalogEntry(kind, child.name, manifest["count"], detail)
                    )
                except (OSError, ValueError, KeyError) as exc:
                    result.problems.append(CatalogProblem(str(child), f"{type(exc).__name__}: {exc}"))
        return result
