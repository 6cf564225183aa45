"""
Rotation systems on the planar 1-skeleton of the alpha complex and their
boundary cycles.

A directed edge u>v is followed by v>w where w is the clockwise successor of
u around v. With this convention bounded faces lie to the left of their
cycles and the outer cycle runs clockwise.
"""
import dataclasses
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from complexes.alpha import RotationSnapshot
from complexes.stream import SimplicialEventStream
from core.errors import EventMismatchError, MalformedComplexError
from core.model import Scenario

logger = logging.getLogger(__name__)

DirectedEdge = Tuple[str, str]


def cycle_key(edges: Sequence[DirectedEdge]) -> str:
    """Serialized lexicographically minimal rotation, e.g. "a>b|b>c|c>a"."""
    edges = list(edges)
    if not edges:
        return ""
    best = min(tuple(edges[k:] + edges[:k]) for k in range(len(edges)))
    return "|".join(f"{u}>{v}" for u, v in best)


def parse_key(key: str) -> Tuple[DirectedEdge, ...]:
    return tuple(tuple(step.split(">", 1)) for step in key.split("|") if step)


@dataclass(frozen=True)
class BoundaryCycle:
    edges: Tuple[DirectedEdge, ...]

    def __post_init__(self):
        if not self.edges:
            raise MalformedComplexError("empty boundary cycle")
        for (a, b), (c, _) in zip(self.edges, self.edges[1:] + self.edges[:1]):
            if b != c:
                raise MalformedComplexError(f"boundary cycle breaks at {a}>{b}")

    @property
    def key(self) -> str:
        return cycle_key(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> FrozenSet[str]:
        return frozenset(u for u, _ in self.edges)

    @property
    def edge_set(self) -> FrozenSet[DirectedEdge]:
        return frozenset(self.edges)

    def signed_area(self, coords: Mapping[str, Sequence[float]]) -> float:
        total = 0.0
        for u, v in self.edges:
            (x1, y1), (x2, y2) = coords[u][:2], coords[v][:2]
            total += x1 * y2 - x2 * y1
        return total / 2

    @classmethod
    def from_key(cls, key: str) -> "BoundaryCycle":
        return cls(parse_key(key))


@dataclass(frozen=True)
class RotationSystem:
    """Clockwise cyclic order of neighbours around every vertex."""
    orders: Dict[str, Tuple[str, ...]]

    def __post_init__(self):
        for v, around in self.orders.items():
            if len(set(around)) != len(around):
                raise MalformedComplexError(f"rotation at {v} repeats a neighbour: {around}")
            if v in around:
                raise MalformedComplexError(f"rotation at {v} contains a loop")
            for w in around:
                if v not in self.orders.get(w, ()):
                    raise MalformedComplexError(f"edge {v}-{w} missing from the rotation at {w}")

    @classmethod
    def from_snapshot(cls, snapshot: RotationSnapshot, vertices: Iterable[str] = ()) -> "RotationSystem":
        orders = {v: () for v in vertices}
        orders.update({v: tuple(nbrs) for v, nbrs in snapshot.orders.items()})
        return cls(orders)

    @property
    def vertices(self) -> List[str]:
        return sorted(self.orders)

    @property
    def edges(self) -> FrozenSet[Tuple[str, str]]:
        return frozenset(tuple(sorted((v, w))) for v, around in self.orders.items() for w in around)

    def directed_edges(self) -> List[DirectedEdge]:
        return sorted((v, w) for v, around in self.orders.items() for w in around)

    def successor(self, edge: DirectedEdge) -> DirectedEdge:
        u, v = edge
        around = self.orders[v]
        return v, around[(around.index(u) + 1) % len(around)]

    def updated(self, removed: Iterable[Tuple[str, str]], added: Iterable[Tuple[str, str]],
                rotations: Optional[Mapping[str, Sequence[str]]]) -> "RotationSystem":
        """
        Rotation system after an edge change; `rotations` gives the new order
        at every endpoint of a changed edge.
        """
        removed, added = [tuple(e) for e in removed], [tuple(e) for e in added]
        edges = set(self.edges)
        for e in removed:
            if e not in edges:
                raise EventMismatchError(f"removing absent edge {e}")
            edges.discard(e)
        for e in added:
            if e in edges:
                raise EventMismatchError(f"adding present edge {e}")
            edges.add(e)
        touched = {v for e in removed + added for v in e}
        if touched and rotations is None:
            raise EventMismatchError(f"edge change at {sorted(touched)} carries no rotation update")
        orders = dict(self.orders)
        for v in touched:
            if v not in rotations:
                raise EventMismatchError(f"no rotation update for touched vertex {v}")
            around = tuple(rotations[v])
            expected = {w for e in edges if v in e for w in e if w != v}
            if set(around) != expected:
                raise EventMismatchError(f"rotation at {v} lists {sorted(around)}, edges give {sorted(expected)}")
            orders[v] = around
        return RotationSystem(orders)


def boundary_cycles(rs: RotationSystem) -> List[BoundaryCycle]:
    """Orbits of the face-traversal successor, sorted by key."""
    seen = set()
    cycles = []
    for start in rs.directed_edges():
        if start in seen:
            continue
        walk = []
        edge = start
        while edge not in seen:
            seen.add(edge)
            walk.append(edge)
            edge = rs.successor(edge)
        if edge != start:
            raise MalformedComplexError(f"face traversal from {start} does not close")
        cycles.append(BoundaryCycle(tuple(walk)))
    return sorted(cycles, key=lambda c: c.key)


def local_cycles(rs: RotationSystem, kept: Iterable[BoundaryCycle]) -> List[BoundaryCycle]:
    """Cycles through the directed edges not covered by `kept`."""
    covered = set()
    for c in kept:
        covered |= c.edge_set
    seen = set(covered)
    out = []
    for start in rs.directed_edges():
        if start in seen:
            continue
        walk, edge = [], start
        while edge not in seen:
            seen.add(edge)
            walk.append(edge)
            edge = rs.successor(edge)
        if edge != start:
            raise MalformedComplexError(f"face traversal from {start} runs into an unchanged cycle")
        out.append(BoundaryCycle(tuple(walk)))
    return out


def outer_cycle(rs: RotationSystem, coords: Mapping[str, Sequence[float]]) -> BoundaryCycle:
    """The boundary cycle with the most negative signed area (clockwise around everything)."""
    cycles = boundary_cycles(rs)
    if not cycles:
        raise MalformedComplexError("no boundary cycles; the 1-skeleton has no edges")
    return min(cycles, key=lambda c: c.signed_area(coords))


def attach_outer(es: SimplicialEventStream, scenario: Scenario) -> SimplicialEventStream:
    """Designate the outer cycle of an alpha stream from the geometry at t = 0."""
    if es.initial_rotations is None:
        raise EventMismatchError("stream carries no rotation system")
    coords = dict(zip(scenario.ids, np.asarray(scenario.positions_at(0.0))))
    rs = RotationSystem.from_snapshot(es.initial_rotations, scenario.ids)
    outer = outer_cycle(rs, coords)
    logger.debug(f"outer cycle at t=0: {outer.key}")
    return dataclasses.replace(es, outer=outer.edges)
