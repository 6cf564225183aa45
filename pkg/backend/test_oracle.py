#!/usr/bin/env python3
"""
Tests for the spacetime-grid oracle
"""
import numpy as np
import pytest

from api.criteria import run_oracle
from core.model import Domain, Scenario, SensorTrajectory
from oracle.spacetime import (EVASION, NO_EVASION, SpacetimeGrid, default_resolution, evasion_oracle,
                              exact_clearance, refine_until_stable, uncovered_mask)
from utils.fixture_builder import teleport_jump, teleport_orbit


def _lone_sensor(side: float) -> Scenario:
    return Scenario(Domain("rectangle", (0.0, 0.0, side, side)),
                    (SensorTrajectory("s", ((0.0, side / 2, side / 2),)),), 1.0, "lone")


def test_orbiting_gap_lets_an_intruder_through():
    scenario = teleport_orbit()
    result = evasion_oracle(scenario, h=0.1)
    assert result.verdict == EVASION
    assert len(result.witness) == len(result.times)
    assert [p[0] for p in result.witness] == result.times
    for t, x, y in result.witness:
        assert exact_clearance(scenario, t, (x, y)) > 0
        assert scenario.domain.contains((x, y))
    assert result.warnings == []


def test_jumping_sensor_clears_the_ring():
    result = evasion_oracle(teleport_jump(), h=0.1)
    assert result.verdict == NO_EVASION
    assert result.witness == []
    assert result.reachable_counts[-1] == 0


def test_refinement_reports_stability():
    result = refine_until_stable(teleport_jump(), 0.1)
    assert result.stable is True
    assert result.verdict == NO_EVASION
    assert result.h == pytest.approx(0.05)


def test_covered_domain_needs_no_refinement():
    # farthest cell center sits about 0.67 from the sensor, well inside the unit ball
    result = refine_until_stable(_lone_sensor(1.0), 0.05)
    assert result.covered_with_margin
    assert result.stable is True
    assert result.verdict == NO_EVASION
    assert result.h == pytest.approx(0.05)
    # the jump leaves a hole open for a while, so its first grid is not enough
    assert not evasion_oracle(teleport_jump(), h=0.1).covered_with_margin


def test_coarse_time_steps_are_flagged():
    result = evasion_oracle(teleport_jump(), h=0.1, dt=0.5)
    assert any("undersampled" in w for w in result.warnings)


def test_static_scenarios():
    holes = evasion_oracle(_lone_sensor(2.0), h=0.25)
    assert holes.verdict == EVASION
    assert holes.times == [0.0, 1.0]
    assert holes.component_counts[0] == 4
    covered = evasion_oracle(_lone_sensor(1.0), h=0.25)
    assert covered.verdict == NO_EVASION
    assert covered.component_counts == [0]


def test_uncovered_mask_counts_cells_outside_every_ball():
    scenario = _lone_sensor(2.0)
    grid = SpacetimeGrid.build(scenario, 0.5, 1.0)
    mask = uncovered_mask(scenario, grid, 0.0)
    assert mask.shape == (4, 4)
    # only the four corner cells have centers farther than r
    assert mask.sum() == 4
    assert mask[0, 0] and mask[3, 3] and not mask[1, 1]


def test_grid_needs_positive_spacing():
    with pytest.raises(ValueError):
        SpacetimeGrid.build(_lone_sensor(2.0), 0.0, 0.1)


def test_default_resolution_tracks_the_fastest_sensor():
    scenario = teleport_jump()
    h, dt = default_resolution(scenario, 0.1)
    vmax = max(s.max_speed() for s in scenario.sensors)
    assert h == 0.1
    assert dt == pytest.approx(min(1.0, 0.1 / (2 * vmax)))
    assert default_resolution(_lone_sensor(2.0), 0.1) == (0.1, 1.0)


def test_oracle_verdict_document():
    verdict, result = run_oracle(teleport_orbit(), h=0.1)
    assert verdict.criterion == "oracle"
    assert verdict.verdict == EVASION
    doc = result.to_document()
    assert doc.verdict == EVASION
    assert np.asarray(doc.witness).shape == (len(result.times), 3)
