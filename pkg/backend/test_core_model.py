#!/usr/bin/env python3
"""
Tests for the scenario model: trajectories, time grids, documents and diagnostics
"""
import json

import numpy as np
import pytest

from core.errors import AssumptionViolation, ScenarioFormatError
from core.model import (Domain, Scenario, SensorTrajectory, TimeGrid, dump_scenario, load_scenario, position_at,
                        validate_assumptions)
from utils.fixture_builder import FIXTURES, cartoon_yes_no, stacked_cech, teleport_orbit


def _pair(distance: float) -> Scenario:
    return Scenario(Domain("rectangle", (0.0, 0.0, 5.0, 5.0)), (
        SensorTrajectory("a", ((0.0, 1.0, 1.0),)),
        SensorTrajectory("b", ((0.0, 1.0 + distance, 1.0),)),
    ))


def test_position_interpolates_and_hits_waypoints():
    traj = SensorTrajectory("m", ((0.0, 0.0, 0.0), (0.5, 1.0, 2.0), (1.0, 1.0, 0.0)))
    assert np.allclose(position_at(traj, 0.25), [0.5, 1.0])
    assert np.array_equal(position_at(traj, 0.5), [1.0, 2.0])
    assert np.array_equal(position_at(traj, 1.0), [1.0, 0.0])
    with pytest.raises(ValueError):
        position_at(traj, 1.5)


def test_static_sensor_has_one_waypoint():
    traj = SensorTrajectory("s", ((0.0, 2.0, 3.0),))
    assert traj.is_static()
    assert traj.max_speed() == 0.0
    assert np.array_equal(position_at(traj, 0.7), [2.0, 3.0])


@pytest.mark.parametrize("waypoints", [
    ((0.1, 0.0, 0.0), (1.0, 1.0, 1.0)),
    ((0.0, 0.0, 0.0), (0.9, 1.0, 1.0)),
    ((0.0, 0.0, 0.0), (0.5, 1.0, 1.0), (0.5, 2.0, 2.0), (1.0, 0.0, 0.0)),
    (),
])
def test_bad_waypoint_times_are_rejected(waypoints):
    with pytest.raises(ScenarioFormatError):
        SensorTrajectory("bad", waypoints)


def test_max_speed_is_the_fastest_segment():
    traj = SensorTrajectory("m", ((0.0, 0.0, 0.0), (0.5, 1.0, 0.0), (1.0, 1.0, 3.0)))
    assert traj.max_speed() == pytest.approx(6.0)


def test_duplicate_ids_and_moving_fence_are_refused():
    domain = Domain("rectangle", (0.0, 0.0, 4.0, 4.0))
    with pytest.raises(ScenarioFormatError):
        Scenario(domain, (SensorTrajectory("a", ((0.0, 1.0, 1.0),)), SensorTrajectory("a", ((0.0, 2.0, 1.0),))))
    with pytest.raises(AssumptionViolation):
        Scenario(domain, (SensorTrajectory("f", ((0.0, 1.0, 1.0), (1.0, 2.0, 1.0)), fence=True),))
    with pytest.raises(AssumptionViolation):
        Scenario(domain, (SensorTrajectory("out", ((0.0, 5.0, 1.0),)),))


def test_time_grid_interleaves_events_and_samples():
    grid = TimeGrid.from_event_times([0.2, 0.6])
    assert grid.n == 2
    assert grid.sample_times == (0.0, 0.4, 1.0)
    assert grid.slot_times() == [0.0, 0.2, 0.4, 0.6, 1.0]


def test_static_time_grid_has_one_slot():
    grid = TimeGrid.from_event_times([])
    assert grid.n == 0
    assert grid.slot_times() == [0.0]


def test_time_grid_rejects_misordered_times():
    with pytest.raises(ValueError):
        TimeGrid((0.5, 0.3), (0.0, 0.4, 1.0))
    with pytest.raises(ValueError):
        TimeGrid((0.5,), (0.0,))


def test_scenario_document_round_trip_keeps_everything():
    original = teleport_orbit()
    again = load_scenario(dump_scenario(original))
    assert again == original


@pytest.mark.parametrize("patch, where", [
    (lambda d: d.update(sensor_radius=-1.0), "sensor_radius"),
    (lambda d: d["domain"].update(params=[0.0, 1.0]), "domain"),
    (lambda d: d["sensors"][0].update(waypoints=[[0.0, 1.0]]), "sensors"),
])
def test_invalid_documents_report_the_field(patch, where):
    doc = json.loads(dump_scenario(stacked_cech()))
    patch(doc)
    with pytest.raises(ScenarioFormatError, match=where):
        load_scenario(json.dumps(doc))


def test_not_json_is_a_format_error():
    with pytest.raises(ScenarioFormatError):
        load_scenario("{not json")


def test_coincident_sensors_raise():
    with pytest.raises(AssumptionViolation):
        validate_assumptions(_pair(0.0), samples=8)


def test_diagnostics_without_fence_warn():
    diagnostics = validate_assumptions(_pair(1.5), samples=8)
    assert diagnostics.min_pair_distance == pytest.approx(1.5)
    assert not diagnostics.fence_covers_boundary
    assert diagnostics.warnings


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixtures_satisfy_the_standing_assumptions(name):
    scenario = FIXTURES[name]()
    diagnostics = validate_assumptions(scenario, samples=90)
    assert diagnostics.sensors_leave_domain == []
    if scenario.fence_ids:
        assert diagnostics.fence_covers_boundary


def test_mirrored_wall_fixtures_differ_only_in_the_cup():
    up, down = cartoon_yes_no("up"), cartoon_yes_no("down")
    moved = {a.id for a, b in zip(up.sensors, down.sensors) if a != b}
    assert moved == {"c", "d"}
    index = [s.id for s in up.sensors]
    cup = [index.index("c"), index.index("d")]
    for t in (0.35, 0.5, 0.66, 0.8):
        pu, pd = up.positions_at(t), down.positions_at(t)
        assert np.allclose(pu[:, 0], pd[:, 0])
        # the wall sits at y = 0 while the cup is out
        assert np.allclose(pu[cup, 1], -pd[cup, 1])


def test_domain_chords():
    box = Domain("rectangle", (0.0, 0.0, 4.0, 2.0))
    assert box.chord((1.0, 1.0), (1.0, 0.0)) == pytest.approx((-1.0, 3.0))
    assert box.chord((1.0, 1.0), (0.0, -1.0)) == pytest.approx((-1.0, 1.0))
    assert box.chord((1.0, 3.0), (1.0, 0.0)) is None
    assert box.chord((-1.0, 3.0), (2 ** -0.5, 2 ** -0.5)) is None
    disk = Domain("disk", (0.0, 0.0, 2.0))
    assert disk.chord((0.0, 0.0), (0.0, 1.0)) == pytest.approx((-2.0, 2.0))
    assert disk.chord((0.0, 3.0), (1.0, 0.0)) is None
