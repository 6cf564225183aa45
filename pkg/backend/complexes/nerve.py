"""
Čech and Vietoris–Rips complexes of a planar sensor configuration.
"""
import logging
from typing import Mapping, Optional, Sequence

import networkx as nx
import numpy as np
from scipy.spatial import cKDTree

from complexes.simplicial import (
    CONTACT_TOL,
    SimplicialComplex,
    as_point_array,
    minimal_enclosing_radius,
)

logger = logging.getLogger(__name__)

# Jung's constant in the plane: VR(JUNG_FACTOR * r) lies inside Čech(r).
JUNG_FACTOR = (3 ** 0.5) / 2


def connectivity_graph(points: Mapping[str, Sequence[float]], r: float) -> nx.Graph:
    """
    Sensors joined whenever their closed radius-r balls meet.

    Args:
        points: sensor id -> coordinates
        r: sensing radius

    Returns:
        networkx Graph with every sensor as a node and `length` on edges.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    ids, coords = as_point_array(points)
    graph = nx.Graph()
    graph.add_nodes_from(ids)
    if len(ids) < 2:
        return graph
    tree = cKDTree(coords)
    for i, j in sorted(tree.query_pairs(2 * r + CONTACT_TOL)):
        length = float(((coords[i] - coords[j]) ** 2).sum() ** 0.5)
        graph.add_edge(ids[i], ids[j], length=length)
    return graph


def _clique_complex(graph: nx.Graph, max_dim: int, accept, t: Optional[float]) -> SimplicialComplex:
    simplices = set()
    for clique in nx.enumerate_all_cliques(graph):
        if len(clique) > max_dim + 1:
            break
        simplex = tuple(sorted(clique))
        if len(simplex) <= 2 or accept(simplex):
            simplices.add(simplex)
    # Enclosing radius is monotone under taking faces, so the accepted set is closed.
    return SimplicialComplex.from_simplices(simplices, t=t, close=False)


def cech_complex(points: Mapping[str, Sequence[float]], r: float, max_dim: int = 3,
                 t: Optional[float] = None) -> SimplicialComplex:
    """Nerve of closed radius-r balls: a simplex iff its smallest enclosing ball has radius <= r."""
    graph = connectivity_graph(points, r)
    ids, array = as_point_array(points)
    coords = dict(zip(ids, array))

    def accept(simplex):
        radius = minimal_enclosing_radius(np.array([coords[v] for v in simplex]))
        return radius <= r + CONTACT_TOL

    cx = _clique_complex(graph, max_dim, accept, t)
    logger.debug(f"Čech complex at t={t}: {cx.counts()}")
    return cx


def vietoris_rips(points: Mapping[str, Sequence[float]], eps: float, max_dim: int = 3,
                  t: Optional[float] = None) -> SimplicialComplex:
    """Flag complex of the graph joining points at distance <= 2 * eps."""
    graph = connectivity_graph(points, eps)
    return _clique_complex(graph, max_dim, lambda simplex: True, t)
