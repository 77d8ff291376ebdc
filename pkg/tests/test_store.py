from __future__ import annotations

import json

import pytest

from chronoflow.errors import (
    ConfigError,
    CorruptionError,
    DuplicateIdError,
    KindMismatchError,
    NotFoundError,
)
from chronoflow.store import (
    Store,
    resolve_root,
    segment_data_bytes,
    stream_data_bytes,
)
from chronoflow.transform import simulate

from conftest import make_segment


@pytest.fixture
def store(tmp_path):
    return Store(tmp_path / "store")


def sample_segment(segment_id="day1"):
    return make_segment([5, 3, 3, 9], segment_id=segment_id, span=10)


def sample_stream(stream_id="hour1", segment=None):
    segment = segment or sample_segment()
    return simulate(segment, 5, stream_id=stream_id)


class TestSegmentRoundTrip:
    def test_events_and_metadata_survive(self, store):
        original = sample_segment()
        store.write_segment(original)
        loaded = store.read_segment("day1")
        assert loaded.events == original.events
        assert (loaded.t_min, loaded.t_max, loaded.count) == (3, 9, 4)
        assert loaded.span_seconds == 10
        assert loaded.config == json.loads(json.dumps(original.config))

    def test_data_bytes_are_canonical(self, store):
        original = sample_segment()
        path = store.write_segment(original)
        assert (path / "data.tsv").read_bytes() == segment_data_bytes(original)

    def test_duplicate_id_is_a_conflict(self, store):
        store.write_segment(sample_segment())
        with pytest.raises(DuplicateIdError):
            store.write_segment(sample_segment())

    def test_single_byte_tamper_detected(self, store):
        path = store.write_segment(sample_segment())
        data_file = path / "data.tsv"
        raw = bytearray(data_file.read_bytes())
        raw[3] ^= 0xFF
        data_file.write_bytes(bytes(raw))
        with pytest.raises(CorruptionError):
            store.read_segment("day1")

    def test_missing_artifact(self, store):
        with pytest.raises(NotFoundError):
            store.read_segment("ghost")

    def test_unsafe_id_rejected(self, store):
        seg = sample_segment()
        seg.segment_id = "../evil"
        with pytest.raises(ConfigError):
            store.write_segment(seg)


class TestStreamRoundTrip:
    def test_round_trip_preserves_grouping(self, store):
        stream = sample_stream()
        store.write_stream(stream)
        loaded = store.read_stream("hour1")
        assert loaded.events == stream.events
        assert loaded.window_seconds == 5
        assert loaded.multiple == stream.multiple
        assert loaded.source_segment_id == "day1"

    def test_identical_inputs_give_identical_digests(self, store):
        segment = sample_segment()
        a = simulate(segment, 5, stream_id="a")
        b = simulate(segment, 5, stream_id="b")
        path_a = store.write_stream(a)
        path_b = store.write_stream(b)
        digest_a = json.loads((path_a / "manifest.json").read_text())["digest"]
        digest_b = json.loads((path_b / "manifest.json").read_text())["digest"]
        assert digest_a == digest_b

    def test_manifest_echo_regenerates_identical_stream(self, store):
        segment = sample_segment()
        store.write_segment(segment)
        path = store.write_stream(sample_stream(segment=segment))
        manifest = json.loads((path / "manifest.json").read_text())
        regenerated = simulate(
            store.read_segment(manifest["source_segment_id"]),
            manifest["window_seconds"],
            manifest["config"]["mode"],
            stream_id="regen",
        )
        assert stream_data_bytes(regenerated) == (path / "data.tsv").read_bytes()

    def test_reading_a_segment_id_as_stream_is_kind_mismatch(self, store):
        store.write_segment(sample_segment())
        with pytest.raises(KindMismatchError):
            store.read_stream("day1")

    def test_reading_a_stream_id_as_segment_is_kind_mismatch(self, store):
        store.write_stream(sample_stream())
        with pytest.raises(KindMismatchError):
            store.read_segment("hour1")

    def test_data_bytes_are_canonical(self, store):
        stream = sample_stream()
        path = store.write_stream(stream)
        assert (path / "data.tsv").read_bytes() == stream_data_bytes(stream)


class TestCatalog:
    def test_empty_store(self, store):
        catalog = store.catalog()
        assert catalog.entries == []
        assert catalog.problems == []

    def test_counts_every_artifact_once(self, store):
        segment = sample_segment()
        store.write_segment(segment)
        store.write_stream(simulate(segment, 5, stream_id="s1"))
        store.write_stream(simulate(segment, 2, stream_id="s2"))
        catalog = store.catalog()
        assert len(catalog.entries) == 3
        kinds = sorted(e.kind for e in catalog.entries)
        assert kinds == ["segment", "stream", "stream"]

    def test_corrupted_manifest_reported_per_entry(self, store):
        segment = sample_segment()
        store.write_segment(segment)
        path_s1 = store.write_stream(simulate(segment, 5, stream_id="s1"))
        store.write_stream(simulate(segment, 2, stream_id="s2"))
        (path_s1 / "manifest.json").write_text("{not json", encoding="utf-8")
        catalog = store.catalog()
        assert len(catalog.entries) == 2
        assert len(catalog.problems) == 1
        assert "s1" in catalog.problems[0].path


class TestResolveRoot:
    def test_explicit_wins(self, monkeypatch, tmp_path):
        monkeypatch.setenv("CHRONO_STORE", str(tmp_path / "env"))
        assert resolve_root(tmp_path / "flag") == tmp_path / "flag"

    def test_env_var_beats_default(self, monkeypatch, tmp_path):
        monkeypatch.setenv("CHRONO_STORE", str(tmp_path / "env"))
        assert resolve_root(None) == tmp_path / "env"

    def test_default(self, monkeypatch):
        monkeypatch.delenv("CHRONO_STORE", raising=False)
        assert str(resolve_root(None)) == "store"
