"""
True/false labels on boundary cycles, carried across alpha events.

A cycle is true when the uncovered region it bounds may hold an intruder.
At t = 0 every cycle is true except the outer cycle and the boundaries of
filled triangles. Across an event, a new cycle is true iff some old cycle
it shares a surviving directed edge with was true; boundaries of filled
triangles are then forced false.
"""
import copy
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Set, Tuple

import networkx as nx

from complexes.simplicial import SimplicialComplex, Simplex
from complexes.stream import EDGE, FLIP, FREE_PAIR, TRIANGLE, EventBatch
from core.errors import ConnectivityViolation, EventMismatchError, NonGenericEventError
from evasion.rotation import BoundaryCycle, RotationSystem, boundary_cycles, local_cycles

logger = logging.getLogger(__name__)


@dataclass
class LabelState:
    labels: Dict[str, bool]
    cycles: Dict[str, BoundaryCycle]
    filled: Set[Simplex]
    outer: str
    history: List[dict] = field(default_factory=list)

    def true_cycles(self) -> List[str]:
        return sorted(k for k, v in self.labels.items() if v)

    def is_triangle_boundary(self, cycle: BoundaryCycle) -> bool:
        return len(cycle) == 3 and tuple(sorted(cycle.vertices)) in self.filled

    def copy(self) -> "LabelState":
        return copy.deepcopy(self)


@dataclass(frozen=True)
class EventChange:
    """Cycles that ended and began at one event, with their inheritance."""
    t: float
    kind: str
    ended: Tuple[str, ...]
    began: Tuple[str, ...]
    parents: Dict[str, Tuple[str, ...]]


def _check_connected(rs: RotationSystem, when: str):
    graph = nx.Graph()
    graph.add_nodes_from(rs.vertices)
    graph.add_edges_from(rs.edges)
    if graph.number_of_nodes() and not nx.is_connected(graph):
        parts = nx.number_connected_components(graph)
        raise ConnectivityViolation(f"covered region splits into {parts} components {when}")


def init_labels(a0: SimplicialComplex, rs: RotationSystem, outer: str) -> LabelState:
    """Labels at t = 0 for alpha complex a0 with rotation system rs."""
    _check_connected(rs, "at t=0")
    cycles = {c.key: c for c in boundary_cycles(rs)}
    if outer not in cycles:
        raise EventMismatchError(f"outer cycle {outer} is not a boundary cycle at t=0")
    filled = set(a0.of_dim(2))
    state = LabelState(labels={}, cycles=cycles, filled=filled, outer=outer)
    for key, cycle in cycles.items():
        state.labels[key] = not (key == outer or state.is_triangle_boundary(cycle))
    logger.debug(f"t=0: {len(cycles)} boundary cycles, {len(state.true_cycles())} labeled true")
    return state


def event_kind(batch: EventBatch) -> str:
    """The alpha event type, inferred from the simplices when the batch does not say."""
    if batch.kind:
        return batch.kind
    if batch.op == FLIP:
        return FLIP
    dims = sorted(len(s) - 1 for s in batch.simplices)
    if dims == [1]:
        return EDGE
    if dims == [2]:
        return TRIANGLE
    if dims == [1, 2]:
        return FREE_PAIR
    raise NonGenericEventError(f"t={batch.t}: batch of dimensions {dims} is not an alpha event")


def _split(simplices) -> Tuple[List[Tuple[str, str]], List[Simplex]]:
    edges, triangles = [], []
    for s in simplices:
        if len(s) == 1:
            raise EventMismatchError(f"vertex {s[0]} changes; the vertex set is fixed")
        (edges if len(s) == 2 else triangles).append(tuple(s))
    return edges, triangles


def apply_event(ls: LabelState, rs: RotationSystem, ev: EventBatch) -> Tuple[LabelState, RotationSystem, EventChange]:
    """
    Apply one classified alpha event.

    Args:
        ls: labels before the event (left untouched)
        rs: rotation system before the event
        ev: the event batch, with rotation updates for every touched vertex

    Returns:
        (labels, rotation system, change record) after the event.
    """
    kind = event_kind(ev)
    removed_edges, removed_tris = _split(ev.removed_set)
    added_edges, added_tris = _split(ev.added_set)
    for tri in removed_tris:
        if tri not in ls.filled:
            raise EventMismatchError(f"t={ev.t}: removing unfilled triangle {tri}")
    for tri in added_tris:
        if tri in ls.filled:
            raise EventMismatchError(f"t={ev.t}: adding filled triangle {tri}")

    new_rs = rs.updated(removed_edges, added_edges, ev.rotations) if removed_edges or added_edges else rs
    for tri in added_tris:
        for a, b in ((tri[0], tri[1]), (tri[0], tri[2]), (tri[1], tri[2])):
            if (a, b) not in new_rs.edges:
                raise EventMismatchError(f"t={ev.t}: triangle {tri} lacks edge {a}-{b}")
    _check_connected(new_rs, f"at t={ev.t:.9f}")

    state = ls.copy()
    state.filled = (ls.filled - set(removed_tris)) | set(added_tris)

    touched = {v for e in removed_edges + added_edges for v in e}
    gone = {tuple(e) for e in removed_edges} | {(v, u) for u, v in removed_edges}
    changed = [k for k, c in ls.cycles.items() if c.vertices & touched or c.edge_set & gone]
    kept = [c for k, c in ls.cycles.items() if k not in changed]
    fresh = local_cycles(new_rs, kept) if changed else []

    parents: Dict[str, Tuple[str, ...]] = {}
    for key in changed:
        del state.cycles[key]
        del state.labels[key]
    for cycle in fresh:
        sources = tuple(sorted(k for k in changed if ls.cycles[k].edge_set & cycle.edge_set))
        parents[cycle.key] = sources
        state.cycles[cycle.key] = cycle
        state.labels[cycle.key] = any(ls.labels[k] for k in sources)

    if ls.outer in changed:
        state.outer = _follow_outer(ls, fresh, parents, ev, kind, added_edges, added_tris)
    for key, cycle in state.cycles.items():
        if key == state.outer or state.is_triangle_boundary(cycle):
            state.labels[key] = False

    # Cycles recomputed without change are continuations, not new components.
    same = set(parents) & set(changed)
    change = EventChange(t=ev.t, kind=kind,
                         ended=tuple(sorted(set(changed) - same)),
                         began=tuple(sorted(set(parents) - same)),
                         parents={k: v for k, v in parents.items() if k not in same})
    state.history.append({"t": ev.t, "kind": kind, "ended": len(change.ended), "began": len(change.began)})
    logger.debug(f"t={ev.t:.6f} {kind} {ev.op}: {len(changed)} cycles replaced by {len(fresh)}, "
                 f"{len(state.true_cycles())} true")
    return state, new_rs, change


def _follow_outer(ls: LabelState, fresh: List[BoundaryCycle], parents: Dict[str, Tuple[str, ...]],
                  ev: EventBatch, kind: str, added_edges: List[Tuple[str, str]],
                  added_tris: List[Simplex]) -> str:
    """The new cycle continuing the outer one: the heir with the largest shared boundary."""
    old = ls.cycles[ls.outer]
    heirs = [c for c in fresh if ls.outer in parents[c.key]]
    if not heirs:
        raise EventMismatchError(f"t={ev.t}: outer cycle vanished")
    heirs = [c for c in heirs if not (len(c) == 3 and tuple(sorted(c.vertices)) in added_tris)] or heirs
    best = max(heirs, key=lambda c: (len(c.edge_set & old.edge_set), c.key))
    on_outer = any((a, b) in best.edge_set or (b, a) in best.edge_set for a, b in added_edges)
    if kind == FREE_PAIR and on_outer:
        logger.warning(f"t={ev.t:.9f}: free pair {added_tris} added with its edge on the outer cycle")
    if len(heirs) > 1:
        logger.info(f"t={ev.t:.9f}: outer cycle split; continuing along {best.key}")
    return best.key
