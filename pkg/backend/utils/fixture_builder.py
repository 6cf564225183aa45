"""
Deterministic generators for the scenario fixtures.

Every fixture is a function returning a Scenario; `write_fixtures` dumps the
whole registry as `<name>.json` into the fixture directory, plus the rotation
system fixtures under `rotations/`.

    python -m utils.fixture_builder [target_dir]
"""
import json
import logging
import math
import os
import sys
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.model import Domain, Scenario, SensorTrajectory, dump_scenario
from dependencies import get_settings
from evasion.rotation import RotationSystem

logger = logging.getLogger(__name__)

Waypoint = Tuple[float, float, float]

# Rectangle used by the wall fixtures: [-4, 4] x [-4.5, 4.5].
WALL_DOMAIN = (-4.0, -4.5, 4.0, 4.5)
WALL_LOW, WALL_MID, WALL_HIGH = -3.5, 0.0, 3.5
CUP_HEIGHT = 1.8

# Interior fence coordinates; the corners are added separately. The offsets
# keep fence pairs from mirroring wall pairs.
_BOTTOM_XS = (-2.69, -1.35, 0.02, 1.31, 2.6)
_TOP_XS = (-2.64, -1.31, -0.03, 1.36, 2.7)
_LEFT_YS = (-3.04, -1.52, 0.03, 1.46, 2.98)
_RIGHT_YS = (-2.93, -1.41, 0.06, 1.57, 3.04)


def _static(sensor_id: str, x: float, y: float, fence: bool = False) -> SensorTrajectory:
    return SensorTrajectory(id=sensor_id, waypoints=((0.0, float(x), float(y)),), fence=fence)


def _track(sensor_id: str, waypoints: Sequence[Waypoint]) -> SensorTrajectory:
    """A mobile sensor; a track that never moves collapses to one waypoint."""
    points = [(float(t), round(float(x), 6), round(float(y), 6)) for t, x, y in waypoints]
    if all((x, y) == points[0][1:] for _, x, y in points):
        return _static(sensor_id, *points[0][1:])
    return SensorTrajectory(id=sensor_id, waypoints=tuple(points))


def _keyframed(sensor_id: str, keys: Sequence[float], xs: Sequence[float], ys: Sequence[float]) -> SensorTrajectory:
    if not len(keys) == len(xs) == len(ys):
        raise ValueError(f"{sensor_id}: keyframe lengths differ")
    return _track(sensor_id, list(zip(keys, xs, ys)))


def rectangle_fence(bounds: Tuple[float, float, float, float], bottom: Sequence[float], top: Sequence[float],
                    left: Sequence[float], right: Sequence[float]) -> List[SensorTrajectory]:
    """Fence sensors on the four corners plus the given interior positions of each side."""
    xmin, ymin, xmax, ymax = bounds
    points = [(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)]
    points += [(x, ymin) for x in bottom] + [(x, ymax) for x in top]
    points += [(xmin, y) for y in left] + [(xmax, y) for y in right]
    return [_static(f"f{k:02d}", x, y, fence=True) for k, (x, y) in enumerate(points)]


def ring_fence(count: int, radius: float, phase: float, jitter: Sequence[Tuple[float, float]] = ()) -> List[SensorTrajectory]:
    """Fence sensors on a circle; jitter holds (radial, angular) offsets per sensor."""
    out = []
    for k in range(count):
        dr, da = jitter[k] if k < len(jitter) else (0.0, 0.0)
        angle = phase + 2 * math.pi * k / count + da
        out.append(_static(f"f{k:02d}", (radius + dr) * math.cos(angle), (radius + dr) * math.sin(angle), fence=True))
    return out


def _polar(radius: float, angle: float) -> Tuple[float, float]:
    return radius * math.cos(angle), radius * math.sin(angle)


# Wall fixtures ----------------------------------------------------------------

def _wall_level(keys: Sequence[float], rise_end: float, sweep_start: float) -> List[float]:
    out = []
    for t in keys:
        if t == 0.0:
            out.append(WALL_LOW)
        elif t < 1.0 or sweep_start == 1.0:
            out.append(WALL_MID if t >= rise_end else WALL_LOW)
        else:
            out.append(WALL_HIGH)
    return out


def cartoon_yes_no(opens: str = "up", name: Optional[str] = None) -> Scenario:
    """
    A horizontal wall of sensors splits the rectangle. It starts next to the
    bottom fence and rises to the middle, so the bottom region is born clear.
    Sensors c and d leave the wall and hang from a and b, c and d close a
    square pocket, and a and b move apart so the pocket opens to the other
    side. c and d rejoin the wall and the wall sweeps the top clear.

    With the cup opening up the pocket is cut from the top region and carries
    an intruder into the bottom one; opening down it is cut from the cleared
    bottom region. The two networks are mirror images around the wall line,
    so their Čech complexes agree at every time.
    """
    if opens not in ("up", "down"):
        raise ValueError("opens must be 'up' or 'down'")
    s = 1.0 if opens == "up" else -1.0
    keys = [0.0, 0.22, 0.28, 0.4, 0.46, 0.56, 0.62, 0.7, 0.76, 0.84, 0.86, 1.0]
    level = [WALL_LOW] + [WALL_MID] * 10 + [WALL_HIGH]
    n = len(keys)
    cup = [0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0]

    def wall(sensor_id, xs, lift=None):
        lift = lift or [0.0] * n
        return _keyframed(sensor_id, keys, xs, [y + s * CUP_HEIGHT * l for y, l in zip(level, lift)])

    sensors = rectangle_fence(WALL_DOMAIN, _BOTTOM_XS, _TOP_XS, _LEFT_YS, _RIGHT_YS)
    sensors += [
        wall("l1", [-3.26] * n),
        wall("l2", [-2.47] * n),
        wall("c", [-1.63, -1.63, -1.63, -1.05, -1.05, -0.72, -0.72, -0.72, -0.72, -0.4, -0.4, -0.4], cup),
        wall("a", [-0.81] * 7 + [-1.3] * 5),
        wall("b", [0.79] * 7 + [1.35] * 5),
        wall("d", [1.57, 1.57, 1.57, 1.02, 1.02, 0.86, 0.86, 0.86, 0.86, 0.5, 0.5, 0.5], cup),
        wall("l3", [2.39] * n),
        wall("l4", [3.18] * n),
    ]
    default = "cartoonYesNoA" if opens == "up" else "cartoonYesNoB"
    return Scenario(Domain("rectangle", WALL_DOMAIN), tuple(sensors), 1.0, name or default)


def sheet_backwards() -> Scenario:
    """
    No evasion path, yet the uncovered region links time 0 to time 1: the
    link runs backwards in time, so no covered sheet separates them.

    The wall rises from the bottom as in cartoon_yes_no, then two columns drop
    from it to the bottom fence and split the cleared bottom region in three.
    An upward cup pocket cut from the top region opens into the middle part,
    the columns squeeze that part shut, and the wall sweeps the top clear.
    """
    keys = [0.0, 0.18, 0.22, 0.3, 0.34, 0.44, 0.48, 0.56, 0.6, 0.66, 0.7, 0.76, 0.8, 0.86, 0.9, 1.0]
    n = len(keys)
    level = [WALL_LOW] + [WALL_MID] * 14 + [WALL_HIGH]
    #      0    .18  .22  .3   .34  .44  .48  .56  .6   .66  .7   .76  .8   .86  .9   1
    cup = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]

    def wall(sensor_id, xs, lift=None):
        lift = lift or [0.0] * n
        return _keyframed(sensor_id, keys, xs, [y + CUP_HEIGHT * l for y, l in zip(level, lift)])

    def column(sensor_id, x0, dropped, squeezed, depth):
        xs = [x0] * 3 + [dropped] * 9 + [squeezed] * 4
        ys = level[:3] + [depth] * 13
        return _keyframed(sensor_id, keys, xs, ys)

    sensors = rectangle_fence(WALL_DOMAIN, _BOTTOM_XS, _TOP_XS, _LEFT_YS, _RIGHT_YS)
    sensors += [
        wall("l1", [-3.26] * n),
        wall("l2", [-2.47] * n),
        wall("c", [-1.63] * 5 + [-1.05, -1.05, -0.72, -0.72, -0.72, -0.72] + [-0.4] * 5, cup),
        wall("a", [-0.81] * 9 + [-1.3] * 7),
        wall("b", [0.79] * 9 + [1.35] * 7),
        wall("d", [1.57] * 5 + [1.02, 1.02, 0.86, 0.86, 0.86, 0.86] + [0.5] * 5, cup),
        wall("l3", [2.39] * n),
        wall("l4", [3.18] * n),
        column("k1", -2.2, -2.25, -0.45, -1.45),
        column("k2", -1.95, -2.05, -0.3, -2.95),
        column("k3", 1.85, 1.9, 0.35, -1.5),
        column("k4", 2.1, 2.1, 0.5, -2.98),
    ]
    return Scenario(Domain("rectangle", WALL_DOMAIN), tuple(sensors), 1.0, "sheetC")


# Ring fixtures ----------------------------------------------------------------

RING_RADIUS = 1.6
RING_DOMAIN = (0.0, 0.0, 1.62)
_RING_JITTER = ((-0.004, 0.011), (-0.017, -0.006), (-0.009, 0.017), (-0.001, -0.013),
                (-0.013, 0.004), (-0.006, -0.019), (-0.019, 0.008), (-0.011, -0.002))


def _ring(name: str, mover: SensorTrajectory, jitter=_RING_JITTER) -> Scenario:
    sensors = ring_fence(8, RING_RADIUS, 0.1, jitter) + [mover]
    return Scenario(Domain("disk", RING_DOMAIN), tuple(sensors), 1.0, name)


def teleport_orbit(name: str = "teleportA", radius: float = 1.0, phase: float = 0.37, jitter=_RING_JITTER) -> Scenario:
    """One sensor circles inside an eight-sensor fence ring; the hole opposite it moves along."""
    waypoints = [(k / 8, *_polar(radius, phase + k * math.pi / 4)) for k in range(9)]
    return _ring(name, _track("m", waypoints), jitter)


def teleport_jump(name: str = "teleportB", start=(-1.0, 0.13), end=(1.0, -0.09), jitter=_RING_JITTER) -> Scenario:
    """The sensor crosses the ring: the hole on one side closes before one opens on the other."""
    waypoints = [(0.0, *start), (0.3, *start), (0.7, *end), (1.0, *end)]
    return _ring(name, _track("m", waypoints), jitter)


def sheet_return() -> Scenario:
    """The sensor passes through the middle and returns; at that moment the disk is covered."""
    waypoints = [(0.0, -1.0, 0.13), (0.25, -1.0, 0.13), (0.5, 0.04, 0.03), (0.75, -0.98, 0.11), (1.0, -0.98, 0.11)]
    return _ring("sheetB", _track("m", waypoints))


def perturbed(builder: Callable[..., Scenario], name: str, seed: int) -> Scenario:
    """The same ring fixture with a seeded wobble of the fence and the mover."""
    rng = np.random.default_rng(seed)
    jitter = [(-float(rng.uniform(0.0, 0.02)), float(rng.uniform(-0.02, 0.02))) for _ in range(8)]
    if builder is teleport_orbit:
        return teleport_orbit(name, radius=float(rng.uniform(0.96, 1.04)),
                              phase=float(rng.uniform(0.0, math.pi / 4)), jitter=jitter)
    dy = rng.uniform(-0.05, 0.05, size=2)
    return teleport_jump(name, start=(-1.0, 0.13 + dy[0]), end=(1.0, -0.09 + dy[1]), jitter=jitter)


# Disconnected coverage --------------------------------------------------------

# Rectangle [-7.3, 7.3] x [-4.5, 5.3]; the wall spans it wall to wall.
NEED_DOMAIN = (-7.3, -4.5, 7.3, 5.3)
NEED_LOW, NEED_MID, NEED_HIGH, NEED_STOP = -3.25, 1.9, 4.05, -0.95
NEED_SHIFT = 3.75
_NEED_BOTTOM_XS = (-5.83, -4.4, -2.9, -1.47, 0.02, 1.44, 2.93, 4.36, 5.85)
_NEED_TOP_XS = (-5.86, -4.37, -2.94, -1.45, -0.02, 1.47, 2.91, 4.39, 5.82)
_NEED_LEFT_YS = (-2.85, -1.25, 0.42, 2.01, 3.68)
_NEED_RIGHT_YS = (-2.88, -1.21, 0.38, 2.05, 3.65)
# Wall sensors sit between consecutive fence sensors; the vertical offsets
# keep their events with the fence apart in time.
_NEED_WALL_XS = (-6.56, -5.12, -3.65, -2.2, -0.74, 0.72, 2.18, 3.66, 5.1, 6.58)
_NEED_WALL_DY = (0.01, -0.015, 0.0, 0.02, -0.01, 0.015, -0.02, 0.005, -0.005, 0.012)
# Where the wall comes to rest around the parked ring; the others return to NEED_LOW.
_NEED_WALL_FINAL = {3: (-1.95, -3.05), 4: (-0.74, -0.95), 5: (0.72, -0.9), 6: (1.95, -3.05)}
_NEED_GAP = (-2.45, 2.75)
# Ring sensors at t = 0, lying in the covered strip between fence and wall.
_NEED_RING_LINE = ((-1.95, -3.83), (-0.65, -3.87), (0.65, -3.84), (1.95, -3.86))
# Ring shapes around their center: open at the bottom, then closed.
_NEED_RING_OPEN = ((-1.32, -0.94), (-0.95, 0.96), (0.94, 0.95), (1.28, -0.96))
_NEED_RING_CLOSED = ((-0.97, -0.93), (-0.95, 0.96), (0.94, 0.95), (0.92, -0.96))
_NEED_RING_FLOAT, _NEED_RING_PARK = (0.0, -1.3), (0.0, -2.8)
_NEED_COLUMN = ((0.03, 0.45), (-0.04, -1.05), (0.02, -2.75))
_NEED_RIDE = ((0.38, 0.5), (-0.36, 0.52), (0.02, 0.62))


def _need_wall(k: int) -> SensorTrajectory:
    x, dy = _NEED_WALL_XS[k], _NEED_WALL_DY[k]
    final = _NEED_WALL_FINAL.get(k, (x, NEED_LOW + dy))
    level = [(0.0, NEED_LOW), (0.03, NEED_LOW), (0.13, NEED_MID)]
    waypoints = [(t, x, y + dy) for t, y in level]
    if k == 2:
        # the gap that lets the top region into the left half of the cleared room
        waypoints += [(0.43, x, NEED_MID + dy), (0.47, *_NEED_GAP), (0.56, *_NEED_GAP)]
        waypoints += [(0.60, x, NEED_MID + dy)]
    level = [(0.80, NEED_MID), (0.85, NEED_HIGH), (0.92, NEED_HIGH), (0.955, NEED_STOP), (0.96, NEED_STOP)]
    waypoints += [(t, x, y + dy) for t, y in level]
    waypoints += [(0.99, *final), (1.0, *final)]
    return _track(f"w{k}", waypoints)


def _need_column(k: int) -> SensorTrajectory:
    dx, dy = _NEED_RIDE[k]

    def ride(level):
        return dx, level + dy

    keys = [(0.0, ride(NEED_LOW)), (0.03, ride(NEED_LOW)), (0.13, ride(NEED_MID)), (0.34, ride(NEED_MID)),
            (0.41, _NEED_COLUMN[k]), (0.62, _NEED_COLUMN[k]), (0.69, ride(NEED_MID)), (0.80, ride(NEED_MID)),
            (0.85, ride(NEED_HIGH)), (0.92, ride(NEED_HIGH)), (0.955, ride(NEED_STOP)), (1.0, ride(NEED_STOP))]
    return _track(f"k{k + 1}", [(t, *p) for t, p in keys])


def _need_ring(k: int, side: float) -> SensorTrajectory:
    def at(center, shape):
        return center[0] + shape[k][0], center[1] + shape[k][1]

    aside = (_NEED_RING_FLOAT[0] + side, _NEED_RING_FLOAT[1])
    keys = [(0.0, _NEED_RING_LINE[k]), (0.15, _NEED_RING_LINE[k]),
            (0.23, at(_NEED_RING_FLOAT, _NEED_RING_OPEN)), (0.25, at(_NEED_RING_FLOAT, _NEED_RING_OPEN)),
            (0.32, at(aside, _NEED_RING_OPEN)), (0.49, at(aside, _NEED_RING_OPEN)),
            (0.54, at(aside, _NEED_RING_CLOSED)), (0.71, at(aside, _NEED_RING_CLOSED)),
            (0.78, at(_NEED_RING_FLOAT, _NEED_RING_CLOSED)), (0.87, at(_NEED_RING_FLOAT, _NEED_RING_CLOSED)),
            (0.91, at(_NEED_RING_PARK, _NEED_RING_CLOSED)), (1.0, at(_NEED_RING_PARK, _NEED_RING_CLOSED))]
    return _track(f"c{k + 1}", [(t, *p) for t, p in keys])


def need_connected(captures_intruder: bool) -> Scenario:
    """
    Two networks with the same alpha complexes and neighbour orders at every
    time, one with an evasion path and one without.

    A wall rises from the bottom fence and clears the room below it. Four
    sensors that lay between fence and wall lift off as an open ring and
    float free, more than 2r from everything else, to the left half of the
    room in (a) or the right half in (b). A column drops from the wall and
    splits the room, and a wall sensor steps aside so the top region, which
    may hold an intruder, spills into the left half only. The ring closes
    around whatever its half holds. The column and the gap close again, the
    ring floats back to the middle and parks on the bottom fence, the wall
    sweeps the top clear and comes back down over the ring.

    Only the hole inside the ring is left uncovered at the end: it holds an
    intruder in (a) and is clear in (b). The floating ring moves rigidly, so
    where it floats never shows in the complexes.
    """
    side = -NEED_SHIFT if captures_intruder else NEED_SHIFT
    sensors = rectangle_fence(NEED_DOMAIN, _NEED_BOTTOM_XS, _NEED_TOP_XS, _NEED_LEFT_YS, _NEED_RIGHT_YS)
    sensors += [_need_wall(k) for k in range(len(_NEED_WALL_XS))]
    sensors += [_need_column(k) for k in range(len(_NEED_COLUMN))]
    sensors += [_need_ring(k, side) for k in range(len(_NEED_RING_LINE))]
    name = "needConnectedA" if captures_intruder else "needConnectedB"
    return Scenario(Domain("rectangle", NEED_DOMAIN), tuple(sensors), 1.0, name)


def stacked_cech() -> Scenario:
    """Three sensors: an edge and a lone vertex, then two edges and a triangle arrive together."""
    sensors = (
        _static("u", 2.0, 1.5),
        _static("v", 3.6, 1.5),
        _track("w", [(0.0, 2.75, 3.9), (0.2, 2.75, 3.9), (0.8, 2.75, 2.4), (1.0, 2.75, 2.4)]),
    )
    return Scenario(Domain("rectangle", (0.0, 0.0, 5.0, 4.0)), sensors, 1.0, "stackedCech")


def fat_graph_uncanonical() -> RotationSystem:
    """K4 given directly by its clockwise orders; it has four boundary cycles."""
    return RotationSystem({
        "a": ("b", "d", "c"),
        "b": ("a", "c", "d"),
        "c": ("a", "d", "b"),
        "d": ("a", "b", "c"),
    })


FIXTURES: Dict[str, Callable[[], Scenario]] = {
    "cartoonYesNoA": lambda: cartoon_yes_no("up"),
    "cartoonYesNoB": lambda: cartoon_yes_no("down"),
    "cartoonNo": lambda: cartoon_yes_no("down", name="cartoonNo"),
    "teleportA": teleport_orbit,
    "teleportB": teleport_jump,
    "sheetB": sheet_return,
    "sheetC": sheet_backwards,
    "teleportA-p1": lambda: perturbed(teleport_orbit, "teleportA-p1", 1),
    "teleportA-p2": lambda: perturbed(teleport_orbit, "teleportA-p2", 2),
    "teleportB-p1": lambda: perturbed(teleport_jump, "teleportB-p1", 1),
    "teleportB-p2": lambda: perturbed(teleport_jump, "teleportB-p2", 2),
    "stackedCech": stacked_cech,
    "needConnectedA": lambda: need_connected(True),
    "needConnectedB": lambda: need_connected(False),
}

# Fixtures whose covered region stays connected, i.e. where label propagation applies.
CONNECTED = ("cartoonYesNoA", "cartoonYesNoB", "cartoonNo", "teleportA", "teleportB", "sheetB", "sheetC",
             "teleportA-p1", "teleportA-p2", "teleportB-p1", "teleportB-p2")

ROTATIONS: Dict[str, Callable[[], RotationSystem]] = {
    "fatGraphUncanonical": fat_graph_uncanonical,
}


def write_fixtures(target_dir: Optional[str] = None) -> List[str]:
    """Write every registered fixture; returns the scenario file paths."""
    target_dir = target_dir or get_settings().fixtures_dir
    os.makedirs(os.path.join(target_dir, "rotations"), exist_ok=True)
    paths = []
    for name, build in FIXTURES.items():
        path = os.path.join(target_dir, f"{name}.json")
        with open(path, "w") as f:
            f.write(dump_scenario(build()) + "\n")
        paths.append(path)
    for name, build in ROTATIONS.items():
        with open(os.path.join(target_dir, "rotations", f"{name}.json"), "w") as f:
            json.dump({v: list(order) for v, order in build().orders.items()}, f, indent=2, sort_keys=True)
            f.write("\n")
    logger.info(f"wrote {len(paths)} scenario fixtures to {target_dir}")
    return paths


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    write_fixtures(sys.argv[1] if len(sys.argv) > 1 else None)
