"""
Locate the finitely many times at which a scenario's complex changes and turn
them into a SimplicialEventStream.
"""
import logging
import math
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple

from complexes.alpha import RotationSnapshot, alpha_complex
from complexes.nerve import JUNG_FACTOR, cech_complex, vietoris_rips
from complexes.simplicial import SimplicialComplex, Simplex
from complexes.stream import (
    ADD,
    EDGE,
    FLIP,
    FREE_PAIR,
    REMOVE,
    TRIANGLE,
    EventBatch,
    SimplicialEventStream,
)
from core.errors import NonGenericEventError
from core.model import Scenario, TimeGrid

logger = logging.getLogger(__name__)

COMPLEX_KINDS = ("cech", "vr", "alpha")
MIN_SAMPLES_PER_SEGMENT = 32

Snapshot = Tuple[SimplicialComplex, Optional[RotationSnapshot]]


def complex_builder(scenario: Scenario, kind: str, max_dim: int = 3,
                    vr_eps: Optional[float] = None) -> Callable[[float], Snapshot]:
    """A memoized t -> (complex, rotations) function for the requested construction."""
    if kind not in COMPLEX_KINDS:
        raise ValueError(f"unknown complex kind {kind!r}")
    r = scenario.sensor_radius
    eps = vr_eps if vr_eps is not None else JUNG_FACTOR * r
    cache: Dict[float, Snapshot] = {}

    def build(t: float) -> Snapshot:
        if t not in cache:
            points = dict(zip(scenario.ids, scenario.positions_at(t)))
            if kind == "cech":
                cache[t] = (cech_complex(points, r, max_dim=max_dim, t=t), None)
            elif kind == "vr":
                cache[t] = (vietoris_rips(points, eps, max_dim=max_dim, t=t), None)
            else:
                cache[t] = alpha_complex(points, r, t=t, domain=scenario.domain)
        return cache[t]

    return build


def _sample_times(scenario: Scenario) -> List[float]:
    speed = max((s.max_speed() for s in scenario.sensors), default=0.0)
    step = scenario.sensor_radius / 32
    bps = scenario.breakpoints()
    times = []
    for a, b in zip(bps, bps[1:]):
        count = max(MIN_SAMPLES_PER_SEGMENT, math.ceil(2 * speed * (b - a) / step))
        times.extend(a + (b - a) * k / count for k in range(count))
    times.append(1.0)
    return times


def _bisect_changes(build, a: float, b: float, tol: float) -> List[Tuple[float, float]]:
    """Intervals of width <= tol, each with a different complex at its two ends."""
    out = []
    stack = [(a, b)]
    while stack:
        lo, hi = stack.pop()
        if build(lo)[0].simplices == build(hi)[0].simplices:
            continue
        if hi - lo <= tol:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((mid, hi))
        stack.append((lo, mid))
    return sorted(out)


def classify_alpha_change(added: FrozenSet[Simplex], removed: FrozenSet[Simplex], t: float,
                          before: SimplicialComplex, after: SimplicialComplex) -> Tuple[str, str]:
    """
    Match one alpha-complex change against the four generic event types.

    Returns:
        (op, kind) with op in add/remove/flip.
    """
    if added and removed:
        if _is_flip(added, removed):
            return FLIP, FLIP
        logger.error(f"composite alpha event at t={t:.9f}: +{sorted(added)} -{sorted(removed)}")
        raise NonGenericEventError(f"alpha event at t={t:.9f} mixes additions and removals and is not a flip")
    op, changed, cx = (ADD, added, after) if added else (REMOVE, removed, before)
    by_dim = sorted(changed, key=len)
    if len(by_dim) == 1 and len(by_dim[0]) == 2:
        return op, EDGE
    if len(by_dim) == 1 and len(by_dim[0]) == 3:
        return op, TRIANGLE
    if len(by_dim) == 2 and len(by_dim[0]) == 2 and len(by_dim[1]) == 3 and set(by_dim[0]) < set(by_dim[1]):
        edge = by_dim[0]
        cofaces = [s for s in cx.of_dim(2) if set(edge) < set(s)]
        if len(cofaces) == 1:
            return op, FREE_PAIR
    logger.error(f"composite alpha event at t={t:.9f}: {op} {sorted(changed)}")
    raise NonGenericEventError(f"alpha event at t={t:.9f} is none of the four generic types: {sorted(changed)}")


def _is_flip(added: FrozenSet[Simplex], removed: FrozenSet[Simplex]) -> bool:
    def split(group):
        edges = [s for s in group if len(s) == 2]
        tris = [s for s in group if len(s) == 3]
        return edges, tris

    old_edges, old_tris = split(removed)
    new_edges, new_tris = split(added)
    if len(old_edges) != 1 or len(new_edges) != 1 or len(old_tris) != 2 or len(new_tris) != 2:
        return False
    if len(added) + len(removed) != 6:
        return False
    quad = set(old_tris[0]) | set(old_tris[1])
    if len(quad) != 4 or quad != set(new_tris[0]) | set(new_tris[1]):
        return False
    e, f = set(old_edges[0]), set(new_edges[0])
    return (e | f == quad and not e & f
            and all(e < set(t) for t in old_tris) and all(f < set(t) for t in new_tris))


def detect_events(scenario: Scenario, kind: str = "cech", tol: float = 1e-9, max_dim: int = 3,
                  vr_eps: Optional[float] = None, coalesce: Optional[bool] = None) -> SimplicialEventStream:
    """
    Event stream of a piecewise-linear scenario.

    Changes are bracketed on a sampling fine enough that no sensor moves more
    than r/32 between samples, then bisected to width `tol`.

    Args:
        scenario: the scenario
        kind: cech, vr or alpha
        tol: time resolution of each located change
        max_dim: truncation for Čech and Vietoris–Rips complexes
        vr_eps: Vietoris–Rips scale; defaults to the lower Jung scale for the sensor radius
        coalesce: merge consecutive changes of one direction into a single batch
            (default on for Čech and Vietoris–Rips, always off for alpha)

    Returns:
        SimplicialEventStream whose batches are pure (flips excepted for alpha).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    build = complex_builder(scenario, kind, max_dim=2 if kind == "alpha" else max_dim, vr_eps=vr_eps)
    coalesce = kind != "alpha" if coalesce is None else coalesce and kind != "alpha"

    samples = _sample_times(scenario)
    changes: List[Tuple[float, float]] = []
    for a, b in zip(samples, samples[1:]):
        changes.extend(_bisect_changes(build, a, b, tol))
    logger.info(f"{kind} complex of {scenario.name or '<unnamed>'}: {len(changes)} changes located")

    raw = []
    for lo, hi in changes:
        before, _ = build(lo)
        after, rot_after = build(hi)
        added = after.simplices - before.simplices
        removed = before.simplices - after.simplices
        t = (lo + hi) / 2
        if kind == "alpha":
            op, event_kind = classify_alpha_change(added, removed, t, before, after)
        elif added and removed:
            raise NonGenericEventError(
                f"simultaneous addition and removal within {tol} at t={t:.9f}; scenario is not generic")
        else:
            op, event_kind = (ADD if added else REMOVE), None
        raw.append(dict(lo=lo, hi=hi, t=t, op=op, kind=event_kind, added=added, removed=removed,
                        rotations=_touched_rotations(added | removed, rot_after)))

    groups: List[List[dict]] = []
    for change in raw:
        if coalesce and groups and groups[-1][-1]["op"] == change["op"]:
            groups[-1].append(change)
        else:
            groups.append([change])

    events, sample_times = [], [0.0]
    for k, group in enumerate(groups):
        first, last = group[0], group[-1]
        added = frozenset().union(*(c["added"] for c in group))
        removed = frozenset().union(*(c["removed"] for c in group))
        if first["op"] == FLIP:
            simplices, extra = removed, added
        else:
            simplices, extra = (added if first["op"] == ADD else removed), frozenset()
        events.append(EventBatch(
            t=first["t"],
            op=first["op"],
            simplices=tuple(sorted(simplices, key=lambda s: (len(s), s))),
            added=tuple(sorted(extra, key=lambda s: (len(s), s))),
            kind=first["kind"],
            rotations=first["rotations"] if kind == "alpha" else None,
        ))
        following = groups[k + 1][0]["lo"] if k + 1 < len(groups) else None
        sample_times.append(1.0 if following is None else (last["hi"] + following) / 2)

    initial, initial_rot = build(0.0)
    return SimplicialEventStream(
        grid=TimeGrid(tuple(e.t for e in events), tuple(sample_times)),
        initial=initial,
        events=tuple(events),
        complex_kind=kind,
        initial_rotations=initial_rot,
        fence=tuple(scenario.fence_ids),
    )


def _touched_rotations(changed, rotation: Optional[RotationSnapshot]) -> Optional[Dict[str, Tuple[str, ...]]]:
    if rotation is None:
        return None
    touched = sorted({v for s in changed if len(s) == 2 for v in s})
    return {v: rotation.neighbours(v) for v in touched}
