"""
Exact evasion decision on alpha streams, with the Reeb graph of the
uncovered region.
"""
import logging
from typing import Dict, List, Tuple

import networkx as nx

from complexes.stream import SimplicialEventStream
from core.errors import EventMismatchError
from db.schema import ReebGraphDocument, ReebNodeDocument
from evasion.labels import LabelState, apply_event, init_labels
from evasion.rotation import RotationSystem, cycle_key

logger = logging.getLogger(__name__)

EVASION_EXISTS = "evasion_exists"
NO_EVASION = "no_evasion"


class ReebGraph:
    """
    Uncovered components over time. A node is one bounded, unfilled boundary
    cycle over the span in which it keeps its key and label; edges point
    from a component to the components it continues into at an event.
    """

    def __init__(self):
        self.graph = nx.DiGraph()

    def open(self, t: float, key: str, label: bool) -> int:
        node = self.graph.number_of_nodes()
        self.graph.add_node(node, t_start=t, t_end=None, cycle=key, label=label)
        return node

    def close(self, node: int, t: float):
        self.graph.nodes[node]["t_end"] = t

    def link(self, parent: int, child: int):
        self.graph.add_edge(parent, child)

    def alive_at(self, t: float) -> List[Dict]:
        return [dict(id=n, **attrs) for n, attrs in self.graph.nodes(data=True)
                if attrs["t_start"] <= t and (attrs["t_end"] is None or t < attrs["t_end"])]

    def true_components_at(self, t: float) -> int:
        return sum(1 for node in self.alive_at(t) if node["label"])

    def to_document(self, verdict: str) -> ReebGraphDocument:
        nodes = [ReebNodeDocument(id=n, t_start=a["t_start"], t_end=a["t_end"], cycle=a["cycle"], label=a["label"])
                 for n, a in sorted(self.graph.nodes(data=True))]
        return ReebGraphDocument(verdict=verdict, nodes=nodes, edges=sorted([u, v] for u, v in self.graph.edges))

    def to_dot(self) -> str:
        lines = ["digraph reeb {", "  rankdir=LR;"]
        for n, a in sorted(self.graph.nodes(data=True)):
            color = "red" if a["label"] else "gray"
            label = f"{a['t_start']:.3f}-{a['t_end']:.3f}\\n{a['cycle']}"
            lines.append(f'  n{n} [label="{label}", color={color}];')
        for u, v in sorted(self.graph.edges):
            lines.append(f"  n{u} -> n{v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _tracked(state: LabelState) -> Dict[str, bool]:
    return {k: label for k, label in state.labels.items()
            if k != state.outer and not state.is_triangle_boundary(state.cycles[k])}


def decide_evasion(es: SimplicialEventStream) -> Tuple[str, ReebGraph]:
    """
    Propagate labels through an alpha stream.

    Returns:
        (evasion_exists | no_evasion, Reeb graph of the uncovered region)
    """
    if es.complex_kind != "alpha":
        raise EventMismatchError(f"label propagation needs an alpha stream, got {es.complex_kind}")
    if es.initial_rotations is None:
        raise EventMismatchError("stream carries no rotation system")
    if not es.outer:
        raise EventMismatchError("stream designates no outer cycle")

    rs = RotationSystem.from_snapshot(es.initial_rotations, es.initial.vertices)
    state = init_labels(es.initial, rs, cycle_key(es.outer))
    times = es.grid.slot_times()
    reeb = ReebGraph()
    active = {k: reeb.open(times[0], k, label) for k, label in _tracked(state).items()}

    for batch in es.events:
        state, rs, change = apply_event(state, rs, batch)
        now = _tracked(state)
        ended = {}
        for key, node in list(active.items()):
            if key not in now or now[key] != reeb.graph.nodes[node]["label"]:
                reeb.close(node, batch.t)
                ended[key] = node
                del active[key]
        for key, label in now.items():
            if key in active:
                continue
            active[key] = reeb.open(batch.t, key, label)
            for parent in change.parents.get(key, (key,)):
                if parent in ended:
                    reeb.link(ended[parent], active[key])
    for node in active.values():
        reeb.close(node, times[-1])

    verdict = EVASION_EXISTS if state.true_cycles() else NO_EVASION
    logger.info(f"label propagation over {es.n} events: {verdict} "
                f"({len(state.true_cycles())} true cycles at t=1, {reeb.graph.number_of_nodes()} Reeb nodes)")
    return verdict, reeb
