from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from chronoflow.errors import ConfigError
from chronoflow.model import Event, ScaledEvent, StreamSegment
from chronoflow.store import stream_data_bytes
from chronoflow.transform import MODE_PREFIX, MODE_SYSTEMATIC, normalize, sample, simulate

from conftest import make_segment


def bucket(events: int, stamp: int = 0) -> list[ScaledEvent]:
    return [ScaledEvent(stamp, i, b"%d" % i) for i in range(events)]


class TestNormalize:
    def test_midpoint_maps_to_midpoint(self):
        segment = make_segment([0, 43200, 86400], span=86401)
        stamps = [e.scale_stamp for e in normalize(segment, 3600)]
        assert stamps[1] == 1800

    def test_lower_endpoint_is_bucket_zero(self):
        segment = make_segment([0, 43200, 86400])
        assert normalize(segment, 3600)[0].scale_stamp == 0

    def test_top_value_clamped_into_last_bucket(self):
        segment = make_segment([0, 43200, 86400])
        assert normalize(segment, 3600)[-1].scale_stamp == 3599

    def test_degenerate_single_second_all_zero(self):
        segment = make_segment([5, 5, 5], span=100)
        assert [e.scale_stamp for e in normalize(segment, 10)] == [0, 0, 0]

    def test_order_and_payloads_preserved(self):
        segment = make_segment([10, 11, 12, 13])
        scaled = normalize(segment, 4)
        assert [e.t_original for e in scaled] == [10, 11, 12, 13]
        assert [e.payload for e in scaled] == [e.payload for e in segment.events]

    def test_window_below_one_rejected(self):
        with pytest.raises(ConfigError):
            normalize(make_segment([1, 2]), 0)


class TestSample:
    def test_prefix_keeps_first_k(self):
        kept = sample(bucket(48), 24, MODE_PREFIX)
        assert [e.t_original for e in kept] == [0, 1]

    def test_systematic_keeps_evenly_spaced(self):
        kept = sample(bucket(48), 24, MODE_SYSTEMATIC)
        # k = round(48/24) = 2 at stride 24: offsets 0 and 24
        assert [e.t_original for e in kept] == [0, 24]

    def test_multiple_one_is_identity(self):
        scaled = bucket(5)
        assert sample(scaled, 1) == scaled

    def test_small_bucket_rounds_to_empty(self):
        assert sample(bucket(10), 24) == []

    def test_half_rounds_to_even(self):
        # 12/24 is exactly one half: round-half-even keeps zero
        assert sample(bucket(12), 24) == []
        # 36/24 = 1.5 rounds to 2
        assert len(sample(bucket(36), 24)) == 2

    def test_multiple_below_one_rejected(self):
        with pytest.raises(ConfigError) as exc:
            sample(bucket(4), Fraction(1, 2))
        assert "window exceeds" in str(exc.value)

    def test_unknown_mode_rejected(self):
        with pytest.raises(ConfigError):
            sample(bucket(4), 2, "shuffle")

    def test_multiple_buckets_ordered(self):
        scaled = bucket(48, stamp=0) + bucket(24, stamp=1)
        kept = sample(scaled, 24)
        assert [e.scale_stamp for e in kept] == [0, 0, 1]


class TestSimulate:
    def test_day_to_hour_multiple(self):
        segment = make_segment([0, 86399], span=86400)
        stream = simulate(segment, 3600, stream_id="s")
        assert stream.multiple == 24

    def test_desk_scale_multiple(self):
        segment = make_segment([0, 239], span=240)
        stream = simulate(segment, 10, stream_id="s")
        assert stream.multiple == 24

    def test_window_equal_to_span_is_identity_thinning(self):
        segment = make_segment([100, 101, 102, 103], span=4)
        stream = simulate(segment, 4, stream_id="s")
        assert stream.multiple == 1
        assert stream.count == segment.count
        assert [e.scale_stamp for e in stream.events] == [0, 1, 2, 3]
        assert [e.payload for e in stream.events] == [e.payload for e in segment.events]

    def test_window_larger_than_span_rejected(self):
        segment = make_segment([0, 99], span=100)
        with pytest.raises(ConfigError):
            simulate(segment, 101, stream_id="s")

    def test_fractional_multiple(self):
        segment = make_segment(list(range(0, 864)), span=864)
        stream = simulate(segment, 30, stream_id="s")
        assert stream.multiple == Fraction(144, 5)

    def test_provenance_echo(self):
        segment = make_segment([0, 239], segment_id="day1", span=240)
        stream = simulate(segment, 10, stream_id="s")
        assert stream.source_segment_id == "day1"
        assert stream.config["window_seconds"] == 10
        assert stream.config["multiple"] == "24"

    @given(
        times=st.lists(st.integers(0, 2000), min_size=1, max_size=200),
        data=st.data(),
        mode=st.sampled_from([MODE_SYSTEMATIC, MODE_PREFIX]),
    )
    def test_simulate_matches_sample_of_normalize(self, times, data, mode):
        segment = make_segment(times)
        window = data.draw(st.integers(1, segment.span_seconds), label="window")
        via_ops = sample(
            normalize(segment, window),
            Fraction(segment.span_seconds, window),
            mode,
        )
        fused = simulate(segment, window, mode, stream_id="s").events
        assert fused == via_ops

    def test_deterministic_bytes(self):
        segment = make_segment(list(range(50)) * 3, span=50)
        a = simulate(segment, 5, stream_id="x")
        b = simulate(segment, 5, stream_id="x")
        assert stream_data_bytes(a) == stream_data_bytes(b)
