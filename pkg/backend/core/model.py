"""
Scenario representation: planar domain, piecewise-linear sensor trajectories
over the time horizon [0, 1], and the interleaved time grid used by every
downstream criterion.
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError
from scipy.spatial.distance import pdist

from core.errors import AssumptionViolation, ScenarioFormatError
from db.schema import DomainDocument, ScenarioDocument, SensorDocument

logger = logging.getLogger(__name__)

GEOMETRY_TOL = 1e-9


@dataclass(frozen=True)
class Domain:
    kind: str
    params: Tuple[float, ...]

    def contains(self, point: Sequence[float], tol: float = GEOMETRY_TOL) -> bool:
        x, y = point
        if self.kind == "rectangle":
            xmin, ymin, xmax, ymax = self.params
            return xmin - tol <= x <= xmax + tol and ymin - tol <= y <= ymax + tol
        cx, cy, radius = self.params
        return float(np.hypot(x - cx, y - cy)) <= radius + tol

    def boundary_points(self, count: int) -> np.ndarray:
        """Evenly spaced points along the domain boundary."""
        s = np.arange(count) / count
        if self.kind == "disk":
            cx, cy, radius = self.params
            angle = 2 * np.pi * s
            return np.column_stack([cx + radius * np.cos(angle), cy + radius * np.sin(angle)])
        xmin, ymin, xmax, ymax = self.params
        w, h = xmax - xmin, ymax - ymin
        d = s * 2 * (w + h)
        pts = np.empty((count, 2))
        for k, dk in enumerate(d):
            if dk < w:
                pts[k] = (xmin + dk, ymin)
            elif dk < w + h:
                pts[k] = (xmax, ymin + dk - w)
            elif dk < 2 * w + h:
                pts[k] = (xmax - (dk - w - h), ymax)
            else:
                pts[k] = (xmin, ymax - (dk - 2 * w - h))
        return pts

    def chord(self, origin: Sequence[float], direction: Sequence[float],
              tol: float = GEOMETRY_TOL) -> Optional[Tuple[float, float]]:
        """
        Parameter interval [lo, hi] of origin + s * direction inside the
        domain, or None when the line misses it. `direction` is a unit vector.
        """
        ox, oy = origin
        dx, dy = direction
        if self.kind == "disk":
            cx, cy, radius = self.params
            b = dx * (ox - cx) + dy * (oy - cy)
            disc = b * b - ((ox - cx) ** 2 + (oy - cy) ** 2 - (radius + tol) ** 2)
            if disc < 0:
                return None
            root = float(np.sqrt(disc))
            return -b - root, -b + root
        xmin, ymin, xmax, ymax = self.params
        lo, hi = -np.inf, np.inf
        for o, d, a, b in ((ox, dx, xmin, xmax), (oy, dy, ymin, ymax)):
            if abs(d) < 1e-15:
                if not a - tol <= o <= b + tol:
                    return None
                continue
            s1, s2 = sorted(((a - tol - o) / d, (b + tol - o) / d))
            lo, hi = max(lo, s1), min(hi, s2)
        return (float(lo), float(hi)) if lo <= hi else None

    def bounds(self) -> Tuple[float, float, float, float]:
        if self.kind == "rectangle":
            return tuple(self.params)
        cx, cy, radius = self.params
        return (cx - radius, cy - radius, cx + radius, cy + radius)


@dataclass(frozen=True)
class SensorTrajectory:
    id: str
    waypoints: Tuple[Tuple[float, float, float], ...]  # (t, x, y)
    fence: bool = False

    def __post_init__(self):
        times = [w[0] for w in self.waypoints]
        if not times:
            raise ScenarioFormatError(f"sensor {self.id}: no waypoints")
        if times[0] != 0.0:
            raise ScenarioFormatError(f"sensor {self.id}: first waypoint time must be 0, got {times[0]}")
        if len(times) > 1 and times[-1] != 1.0:
            raise ScenarioFormatError(f"sensor {self.id}: last waypoint time must be 1, got {times[-1]}")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ScenarioFormatError(f"sensor {self.id}: waypoint times must be strictly increasing")

    @property
    def times(self) -> np.ndarray:
        return np.array([w[0] for w in self.waypoints])

    @property
    def points(self) -> np.ndarray:
        return np.array([(w[1], w[2]) for w in self.waypoints])

    def is_static(self) -> bool:
        pts = self.points
        return bool(np.all(pts == pts[0]))

    def max_speed(self) -> float:
        if len(self.waypoints) < 2:
            return 0.0
        steps = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        return float(np.max(steps / np.diff(self.times)))


def position_at(traj: SensorTrajectory, t: float) -> np.ndarray:
    """
    Evaluate a piecewise-linear trajectory.

    Args:
        traj: the sensor trajectory
        t: time in [0, 1]

    Returns:
        The interpolated 2D position, exact at waypoints.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"time {t} outside [0, 1]")
    times, pts = traj.times, traj.points
    if len(times) == 1:
        return pts[0].copy()
    k = int(np.searchsorted(times, t, side="right")) - 1
    k = min(max(k, 0), len(times) - 2)
    t0, t1 = times[k], times[k + 1]
    if t == t0:
        return pts[k].copy()
    if t == t1:
        return pts[k + 1].copy()
    lam = (t - t0) / (t1 - t0)
    return (1 - lam) * pts[k] + lam * pts[k + 1]


@dataclass(frozen=True)
class Scenario:
    domain: Domain
    sensors: Tuple[SensorTrajectory, ...]
    sensor_radius: float = 1.0
    name: Optional[str] = None

    def __post_init__(self):
        ids = [s.id for s in self.sensors]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise ScenarioFormatError(f"duplicate sensor ids: {dup}")
        for s in self.sensors:
            if s.fence and not s.is_static():
                raise AssumptionViolation(f"fence sensor moves: {s.id}")
            for t, x, y in s.waypoints:
                if not self.domain.contains((x, y)):
                    raise AssumptionViolation(f"sensor {s.id} waypoint at t={t} lies outside the domain")

    @property
    def ids(self) -> List[str]:
        return [s.id for s in self.sensors]

    @property
    def fence_ids(self) -> List[str]:
        return [s.id for s in self.sensors if s.fence]

    def positions_at(self, t: float) -> np.ndarray:
        if not self.sensors:
            return np.zeros((0, 2))
        return np.array([position_at(s, t) for s in self.sensors])

    def breakpoints(self) -> List[float]:
        """All waypoint times, i.e. where some velocity may change."""
        return sorted({w[0] for s in self.sensors for w in s.waypoints} | {0.0, 1.0})


@dataclass(frozen=True)
class TimeGrid:
    event_times: Tuple[float, ...]
    sample_times: Tuple[float, ...]

    def __post_init__(self):
        if len(self.sample_times) != len(self.event_times) + 1:
            raise ValueError("need exactly n + 1 sample times for n event times")
        if not self.event_times:
            # A static stream has the single slice C(0).
            if not 0.0 <= self.sample_times[0] <= 1.0:
                raise ValueError(f"sample time {self.sample_times[0]} outside [0, 1]")
            return
        merged = self.slot_times()
        if merged[0] != 0.0 or merged[-1] != 1.0 or any(b <= a for a, b in zip(merged, merged[1:])):
            raise ValueError(f"time grid is not strictly interleaved in [0, 1]: {merged}")

    @property
    def n(self) -> int:
        return len(self.event_times)

    @classmethod
    def from_event_times(cls, event_times: Sequence[float]) -> "TimeGrid":
        ts = list(event_times)
        if not ts:
            return cls((), (0.0,))
        inner = [(a + b) / 2 for a, b in zip(ts, ts[1:])]
        return cls(tuple(ts), tuple([0.0] + inner + [1.0]))

    def slot_times(self) -> List[float]:
        """Time attached to each of the 2n + 1 zigzag slots."""
        out = [self.sample_times[0]]
        for t, s in zip(self.event_times, self.sample_times[1:]):
            out += [t, s]
        return out


@dataclass
class Diagnostics:
    min_pair_distance: float
    fence_covers_boundary: bool
    sensors_leave_domain: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)


def load_scenario(text: str) -> Scenario:
    """Parse and validate a scenario JSON document."""
    try:
        doc = ScenarioDocument.model_validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]
        loc = ".".join(str(p) for p in first["loc"])
        raise ScenarioFormatError(f"invalid scenario at {loc or '<root>'}: {first['msg']}") from e
    return scenario_from_document(doc)


def scenario_from_document(doc: ScenarioDocument) -> Scenario:
    sensors = tuple(
        SensorTrajectory(id=s.id, fence=s.fence, waypoints=tuple(tuple(w) for w in s.waypoints))
        for s in doc.sensors
    )
    scenario = Scenario(
        domain=Domain(doc.domain.kind, tuple(doc.domain.params)),
        sensors=sensors,
        sensor_radius=doc.sensor_radius,
        name=doc.name,
    )
    logger.info(f"Loaded scenario {doc.name or '<unnamed>'} with {len(sensors)} sensors")
    return scenario


def scenario_to_document(scenario: Scenario) -> ScenarioDocument:
    return ScenarioDocument(
        name=scenario.name,
        domain=DomainDocument(kind=scenario.domain.kind, params=list(scenario.domain.params)),
        sensor_radius=scenario.sensor_radius,
        sensors=[
            SensorDocument(id=s.id, fence=s.fence, waypoints=[list(w) for w in s.waypoints])
            for s in scenario.sensors
        ],
    )


def dump_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_document(scenario).model_dump(exclude_none=True), indent=2)


def validate_assumptions(scenario: Scenario, samples: int = 360) -> Diagnostics:
    """
    Check the standing assumptions on a scenario.

    Args:
        scenario: the scenario to check
        samples: number of sampled times, also the boundary sampling resolution

    Returns:
        Diagnostics; only coincident sensors raise.
    """
    if samples < 2:
        raise ValueError("samples must be at least 2")
    times = sorted(set(np.linspace(0.0, 1.0, samples).tolist()) | set(scenario.breakpoints()))
    min_dist = float("inf")
    leaving = set()
    for t in times:
        pts = scenario.positions_at(t)
        if len(pts) >= 2:
            d = float(np.min(pdist(pts)))
            if d <= GEOMETRY_TOL:
                raise AssumptionViolation(f"coincident sensors at t={t:.6f}")
            min_dist = min(min_dist, d)
        for s, p in zip(scenario.sensors, pts):
            if not scenario.domain.contains(p):
                leaving.add(s.id)

    diagnostics = Diagnostics(min_pair_distance=min_dist, fence_covers_boundary=False)
    fence = np.array([s.points[0] for s in scenario.sensors if s.fence]).reshape(-1, 2)
    if len(fence):
        boundary = scenario.domain.boundary_points(samples)
        gaps = np.linalg.norm(boundary[:, None, :] - fence[None, :, :], axis=2).min(axis=1)
        diagnostics.fence_covers_boundary = bool(np.all(gaps <= scenario.sensor_radius + GEOMETRY_TOL))
    if not diagnostics.fence_covers_boundary:
        diagnostics.warnings.append("fence does not cover boundary")
    if leaving:
        diagnostics.sensors_leave_domain = sorted(leaving)
        diagnostics.warnings.append(f"sensors leave the domain: {sorted(leaving)}")
    for w in diagnostics.warnings:
        logger.warning(w)
    return diagnostics
