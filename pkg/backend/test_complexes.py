#!/usr/bin/env python3
"""
Tests for Čech, Vietoris–Rips and alpha complexes and their event streams
"""
import itertools

import numpy as np
import pytest

from api.pipeline import static_coverage_hole_count
from complexes.alpha import alpha_complex, delaunay_edges, edges_cross
from complexes.events import classify_alpha_change, detect_events
from complexes.nerve import cech_complex, connectivity_graph, vietoris_rips
from complexes.simplicial import SimplicialComplex, minimal_enclosing_radius
from complexes.stream import (ADD, EDGE, FLIP, FREE_PAIR, REMOVE, TRIANGLE, EventBatch, apply_batch, dump_stream,
                              load_stream)
from core.errors import DegeneratePositionError, EventMismatchError, MalformedComplexError, NonGenericEventError
from core.model import Domain, Scenario, SensorTrajectory
from utils.fixture_builder import cartoon_yes_no, stacked_cech, teleport_orbit

TRIANGLE_SIDE_2 = {"a": (0.0, 0.0), "b": (2.0, 0.0), "c": (1.0, 3 ** 0.5)}


def _cx(*simplices):
    return SimplicialComplex.from_simplices(simplices)


def test_balls_touching_at_one_point_are_connected():
    graph = connectivity_graph({"a": (0.0, 0.0), "b": (2.0, 0.0), "c": (4.01, 0.0)}, 1.0)
    assert graph.has_edge("a", "b")
    assert not graph.has_edge("b", "c")
    assert graph.edges["a", "b"]["length"] == pytest.approx(2.0)


def test_rips_fills_the_triangle_that_cech_leaves_open():
    rips = vietoris_rips(TRIANGLE_SIDE_2, 1.0)
    cech = cech_complex(TRIANGLE_SIDE_2, 1.0)
    assert ("a", "b", "c") in rips.simplices
    assert ("a", "b", "c") not in cech.simplices
    assert cech.edges == rips.edges == [("a", "b"), ("a", "c"), ("b", "c")]


def test_cech_triangle_needs_its_enclosing_ball():
    assert minimal_enclosing_radius(np.array(list(TRIANGLE_SIDE_2.values()))) == pytest.approx(2 / 3 ** 0.5)
    bigger = cech_complex(TRIANGLE_SIDE_2, 1.2)
    assert ("a", "b", "c") in bigger.simplices


def test_closed_complex_rejects_missing_faces():
    with pytest.raises(MalformedComplexError):
        SimplicialComplex.from_simplices([("a", "b", "c")], close=False)
    assert len(_cx(("a", "b", "c"))) == 7


def test_alpha_complex_sits_inside_delaunay_and_cech():
    rng = np.random.default_rng(7)
    points = {f"s{i:02d}": tuple(p) for i, p in enumerate(rng.uniform(0.0, 4.0, size=(14, 2)))}
    alpha, _ = alpha_complex(points, 0.8)
    cech = cech_complex(points, 0.8, max_dim=2)
    assert set(alpha.edges) <= set(delaunay_edges(points))
    assert alpha.simplices <= cech.simplices
    for (a, b), (c, d) in itertools.combinations(alpha.edges, 2):
        assert not edges_cross(points[a], points[b], points[c], points[d])


def test_alpha_rotation_is_clockwise_from_the_smallest_id():
    points = {"o": (0.0, 0.0), "e": (1.0, 0.02), "n": (-0.03, 1.0), "w": (-1.0, -0.01), "s": (0.02, -1.04)}
    cx, rotation = alpha_complex(points, 1.0)
    assert rotation.neighbours("o") == ("e", "s", "w", "n")
    assert ("e", "n", "o") in cx.simplices


def test_small_cocircular_square_is_degenerate():
    square = {"a": (0.0, 0.0), "b": (1.0, 0.0), "c": (1.0, 1.0), "d": (0.0, 1.0)}
    with pytest.raises(DegeneratePositionError):
        alpha_complex(square, 1.0)
    wide = {k: (4 * x, 4 * y) for k, (x, y) in square.items()}
    cx, _ = alpha_complex(wide, 1.0)
    assert cx.edges == []


def test_collinear_points_give_a_path():
    cx, rotation = alpha_complex({"a": (0.0, 0.0), "b": (1.0, 0.0), "c": (2.5, 0.0)}, 1.0)
    assert cx.edges == [("a", "b"), ("b", "c")]
    assert rotation.neighbours("b") == ("a", "c")


def test_voronoi_cells_are_clipped_to_the_domain():
    # obtuse at c: circumcenter (0.8, -0.5) with radius 1, below the floor y = 0
    points = {"a": (0.0, 0.1), "b": (1.6, 0.1), "c": (0.8, 0.5)}
    plane, _ = alpha_complex(points, 1.2)
    assert ("a", "b", "c") in plane.simplices
    clipped, rotation = alpha_complex(points, 1.2, domain=Domain("rectangle", (0.0, 0.0, 5.0, 5.0)))
    # the edge dual to ab lies entirely below the floor
    assert clipped.edges == [("a", "c"), ("b", "c")]
    assert clipped.of_dim(2) == []
    assert rotation.neighbours("a") == ("c",)
    lowered, _ = alpha_complex(points, 1.2, domain=Domain("rectangle", (0.0, -1.0, 5.0, 5.0)))
    assert lowered.simplices == plane.simplices


@pytest.mark.parametrize("before, after, expected", [
    (_cx(("a",), ("b",)), _cx(("a", "b")), (ADD, EDGE)),
    (_cx(("a", "b"), ("b", "c"), ("a", "c")), _cx(("a", "b", "c")), (ADD, TRIANGLE)),
    (_cx(("a", "b", "c")), _cx(("a", "c"), ("b", "c")), (REMOVE, FREE_PAIR)),
    (_cx(("a", "b", "c"), ("a", "c", "d")), _cx(("a", "b", "d"), ("b", "c", "d")), (FLIP, FLIP)),
])
def test_alpha_changes_are_classified(before, after, expected):
    added = after.simplices - before.simplices
    removed = before.simplices - after.simplices
    assert classify_alpha_change(added, removed, 0.5, before, after) == expected


@pytest.mark.parametrize("before, after", [
    (_cx(("a",), ("b",), ("c",)), _cx(("a", "b"), ("b", "c"))),
    (_cx(("a", "b"), ("c",)), _cx(("a",), ("b", "c"))),
    (_cx(("a", "b", "c"), ("b", "c", "d")), _cx(("a", "b"), ("a", "c"), ("b", "d"), ("c", "d"))),
])
def test_composite_alpha_changes_are_not_generic(before, after):
    added = after.simplices - before.simplices
    removed = before.simplices - after.simplices
    with pytest.raises(NonGenericEventError):
        classify_alpha_change(added, removed, 0.5, before, after)


def test_stacked_scenario_has_one_coalesced_addition():
    es = detect_events(stacked_cech(), "cech")
    assert es.n == 1
    batch = es.events[0]
    assert batch.op == ADD
    assert set(batch.simplices) == {("u", "w"), ("v", "w"), ("u", "v", "w")}
    assert 0.2 < batch.t < 0.8
    first, last = es.slices()
    assert first.edges == [("u", "v")]
    assert ("u", "v", "w") in last.simplices
    # uw, vw and the triangle arrive at three distinct times
    assert detect_events(stacked_cech(), "cech", coalesce=False).n == 3


def test_uncoalesced_additions_keep_their_own_slices():
    # b reaches distance 2 from a at t = 0.3, c at t = 0.7; b and c never meet
    scenario = Scenario(Domain("rectangle", (0.0, 0.0, 10.0, 10.0)), (
        SensorTrajectory("a", ((0.0, 5.0, 5.0),)),
        SensorTrajectory("b", ((0.0, 2.7, 5.0), (1.0, 3.7, 5.0))),
        SensorTrajectory("c", ((0.0, 5.0, 7.7), (1.0, 5.0, 6.7))),
    ), 1.0, "twoArrivals")
    split = detect_events(scenario, "cech", coalesce=False)
    assert split.n == 2
    assert [batch.simplices for batch in split.events] == [(("a", "b"),), (("a", "c"),)]
    assert split.grid.event_times == pytest.approx((0.3, 0.7), abs=1e-6)
    merged = detect_events(scenario, "cech")
    assert merged.n == 1
    assert set(merged.events[0].simplices) == {("a", "b"), ("a", "c")}


def test_unknown_complex_kind_and_bad_tolerance():
    with pytest.raises(ValueError):
        detect_events(stacked_cech(), "witness")
    with pytest.raises(ValueError):
        detect_events(stacked_cech(), "cech", tol=0.0)


def test_simultaneous_addition_and_removal_is_not_generic():
    # m leaves a and reaches b at the same instant
    scenario = Scenario(Domain("rectangle", (-1.0, -2.0, 5.0, 2.0)), (
        SensorTrajectory("a", ((0.0, 0.0, 0.0),)),
        SensorTrajectory("b", ((0.0, 4.0, 0.0),)),
        SensorTrajectory("m", ((0.0, 0.7, 0.0), (1.0, 3.0, 0.0))),
    ))
    with pytest.raises(NonGenericEventError):
        detect_events(scenario, "cech")


def test_alpha_stream_replays_to_the_final_complex():
    scenario = cartoon_yes_no("down")
    es = detect_events(scenario, "alpha")
    final, _ = alpha_complex(dict(zip(scenario.ids, scenario.positions_at(1.0))), scenario.sensor_radius,
                             domain=scenario.domain)
    assert es.slices()[-1].simplices == final.simplices
    assert all(b.kind in (EDGE, TRIANGLE, FREE_PAIR, FLIP) for b in es.events)


def test_event_stream_document_reloads():
    es = detect_events(stacked_cech(), "cech")
    again = load_stream(dump_stream(es))
    assert again.grid == es.grid
    assert again.initial.simplices == es.initial.simplices
    assert again.signature() == es.signature()


@pytest.mark.parametrize("batch", [
    EventBatch(0.5, REMOVE, (("a", "c"),)),
    EventBatch(0.5, ADD, (("a", "b"),)),
    EventBatch(0.5, ADD, (("a", "b", "c"),)),
])
def test_apply_batch_checks_the_current_complex(batch):
    with pytest.raises(EventMismatchError):
        apply_batch(_cx(("a", "b"), ("c",)), batch)


def test_apply_batch_flip():
    before = _cx(("a", "b", "c"), ("a", "c", "d"))
    flip = EventBatch(0.5, FLIP, (("a", "c"), ("a", "b", "c"), ("a", "c", "d")),
                      added=(("b", "d"), ("a", "b", "d"), ("b", "c", "d")))
    after = apply_batch(before, flip)
    assert after.simplices == _cx(("a", "b", "d"), ("b", "c", "d")).simplices


def test_coverage_hole_count():
    assert static_coverage_hole_count(teleport_orbit(), 0.0) == 1
    assert static_coverage_hole_count(stacked_cech(), 1.0) == 0


@pytest.mark.parametrize("seed", range(20))
def test_cech_is_sandwiched_between_rips_complexes(seed):
    rng = np.random.default_rng(seed)
    points = {f"s{i:02d}": tuple(p) for i, p in enumerate(rng.uniform(0.0, 5.0, size=(15, 2)))}
    lower = vietoris_rips(points, 3 ** 0.5 / 2)
    cech = cech_complex(points, 1.0)
    upper = vietoris_rips(points, 1.0)
    assert lower.simplices <= cech.simplices <= upper.simplices


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(20, 220))
def test_cech_sandwich_over_many_point_sets(seed):
    rng = np.random.default_rng(seed)
    points = {f"s{i:02d}": tuple(p) for i, p in enumerate(rng.uniform(0.0, 5.0, size=(15, 2)))}
    cech = cech_complex(points, 1.0)
    assert vietoris_rips(points, 3 ** 0.5 / 2).simplices <= cech.simplices <= vietoris_rips(points, 1.0).simplices
