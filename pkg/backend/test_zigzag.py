#!/usr/bin/env python3
"""
Tests for zigzag modules, interval decomposition and the streaming barcode
"""
import numpy as np
import pytest

from complexes.events import detect_events
from complexes.simplicial import SimplicialComplex
from complexes.stream import ADD, REMOVE, EventBatch, SimplicialEventStream
from core.model import TimeGrid
from core.errors import SizeLimitExceeded
from zigzag.decompose import brute_force_decompose, covering_count, decompose
from zigzag.module import LEFT, RIGHT, Arrow, Barcode, ZigzagModule, direct_sum, interval_module, random_module
from zigzag.streaming import (EVASION_POSSIBLE, NO_EVASION_CERTIFIED, StreamingStats, batch_barcode,
                              cohomology_zigzag, full_length_criterion, random_stream, stream_barcode)
from utils.fixture_builder import cartoon_yes_no, stacked_cech


@pytest.fixture(scope="module")
def stacked_stream():
    return detect_events(stacked_cech(), "cech")


def test_stacked_components_merge(stacked_stream):
    barcode = stream_barcode(stacked_stream, 0)
    assert barcode.m == 3
    assert barcode.intervals == [(1, 1), (1, 3)]
    assert barcode.dims() == [2, 1, 1]
    assert barcode.slot_times[0] == 0.0 and barcode.slot_times[-1] == 1.0
    assert batch_barcode(stacked_stream, 0) == barcode
    assert full_length_criterion(barcode, stacked_stream.n) == EVASION_POSSIBLE


def test_stacked_has_no_loops(stacked_stream):
    barcode = stream_barcode(stacked_stream, 1)
    assert barcode.intervals == []
    assert full_length_criterion(barcode, stacked_stream.n) == NO_EVASION_CERTIFIED


def test_sums_of_intervals_decompose_back():
    directions = [RIGHT, LEFT, LEFT, RIGHT, LEFT]
    bars = [(1, 6), (2, 4), (3, 3), (2, 6), (5, 6)]
    module = direct_sum(interval_module(b, d, directions) for b, d in bars)
    barcode = decompose(module)
    assert barcode.intervals == sorted(bars)
    barcode.check_consistency(module)
    assert covering_count(module) == 1


@pytest.mark.parametrize("seed", range(12))
def test_decomposition_matches_exhaustive_search(seed):
    rng = np.random.default_rng(seed)
    module = random_module(rng, length=int(rng.integers(2, 6)), max_dim=2, max_total=7)
    fast = decompose(module)
    assert fast == brute_force_decompose(module)
    fast.check_consistency(module)
    assert decompose(module.dual()) == fast


@pytest.mark.parametrize("p", [3, 5])
def test_decomposition_over_odd_primes_is_consistent(p):
    rng = np.random.default_rng(p)
    for _ in range(5):
        module = random_module(rng, length=5, max_dim=3, p=p)
        decompose(module).check_consistency(module)


def test_exhaustive_search_has_limits():
    big = ZigzagModule([8, 8], [Arrow(RIGHT, np.eye(8, dtype=np.int64))])
    with pytest.raises(SizeLimitExceeded):
        brute_force_decompose(big)
    with pytest.raises(ValueError):
        brute_force_decompose(ZigzagModule([1], [], p=3))


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("j", [0, 1])
def test_streaming_matches_batch(seed, j):
    es = random_stream(np.random.default_rng(seed), n_vertices=5, n_events=7)
    stats = StreamingStats()
    streamed = stream_barcode(es, j, 2, stats)
    assert streamed == batch_barcode(es, j, 2)
    assert stats.peak_tracked <= 2 * es.max_slice_size()


@pytest.mark.parametrize("seed", range(4))
def test_streaming_over_f3_and_cohomology(seed):
    es = random_stream(np.random.default_rng(100 + seed), n_vertices=5, n_events=6)
    streamed = stream_barcode(es, 1, 3)
    assert streamed == batch_barcode(es, 1, 3)
    assert cohomology_zigzag(es, 1, 3) == streamed


def test_module_shapes_are_checked():
    with pytest.raises(ValueError):
        ZigzagModule([1, 2], [Arrow(RIGHT, np.zeros((1, 2), dtype=np.int64))])
    with pytest.raises(ValueError):
        ZigzagModule([1, 1], [])
    with pytest.raises(ValueError):
        ZigzagModule([1], [], p=6)


def test_barcode_rejects_out_of_range_intervals():
    with pytest.raises(ValueError):
        Barcode(3, [(0, 2)])
    with pytest.raises(ValueError):
        Barcode(3, [(2, 4)])
    assert Barcode(3, [(1, 3), (2, 2)]).full_length() == [(1, 3)]


def test_mirrored_walls_share_their_zigzag():
    up = detect_events(cartoon_yes_no("up"), "cech")
    down = detect_events(cartoon_yes_no("down"), "cech")
    assert up.signature() == down.signature()
    assert up.initial.simplices == down.initial.simplices
    bars_up, bars_down = stream_barcode(up, 1), stream_barcode(down, 1)
    assert bars_up == bars_down
    assert full_length_criterion(bars_up, up.n) == EVASION_POSSIBLE


def flicker_stream(n_events: int = 50) -> SimplicialEventStream:
    """One edge between two vertices, added and removed in turn."""
    edge = ("a", "b")
    times = [(k + 1) / (n_events + 1) for k in range(n_events)]
    events = tuple(EventBatch(t, ADD if k % 2 == 0 else REMOVE, (edge,)) for k, t in enumerate(times))
    initial = SimplicialComplex.from_simplices([("a",), ("b",)])
    return SimplicialEventStream(TimeGrid.from_event_times(times), initial, events)


def test_streaming_memory_tracks_the_slice_not_the_history():
    es = flicker_stream(50)
    history = len(es.initial) + sum(len(b.simplices) for b in es.events)
    assert history >= 10 * es.max_slice_size()
    for j in (0, 1):
        stats = StreamingStats()
        streamed = stream_barcode(es, j, 2, stats)
        assert streamed == batch_barcode(es, j, 2)
        assert stats.peak_tracked <= 2 * es.max_slice_size()
    # two components at both ends, one of them all the way through
    assert full_length_criterion(stream_barcode(es, 0), es.n) == EVASION_POSSIBLE


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(50))
def test_decomposition_matches_exhaustive_search_at_depth(seed):
    rng = np.random.default_rng(1000 + seed)
    module = random_module(rng, length=int(rng.integers(2, 8)), max_dim=3, max_total=10)
    fast = decompose(module)
    assert fast == brute_force_decompose(module)
    fast.check_consistency(module)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(100))
@pytest.mark.parametrize("j", [0, 1])
@pytest.mark.parametrize("p", [2, 3])
def test_homology_streaming_and_cohomology_agree(seed, j, p):
    es = random_stream(np.random.default_rng(2000 + seed), n_vertices=6, n_events=8)
    stats = StreamingStats()
    streamed = stream_barcode(es, j, p, stats)
    assert streamed == batch_barcode(es, j, p)
    assert cohomology_zigzag(es, j, p) == streamed
    assert stats.peak_tracked <= 2 * es.max_slice_size()
