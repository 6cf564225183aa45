"""
Alpha complex of a planar configuration: the nerve of each sensor ball clipped
to its Voronoi cell, built from the Delaunay triangulation, together with the
clockwise neighbour order at every vertex.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import Delaunay, QhullError

from complexes.simplicial import CONTACT_TOL, SimplicialComplex, Simplex, as_point_array
from core.errors import DegeneratePositionError
from core.model import Domain

logger = logging.getLogger(__name__)

# Predicates are evaluated in coordinates normalized to unit diameter.
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class RotationSnapshot:
    """Clockwise neighbour order around each vertex, starting at the smallest id."""
    orders: Dict[str, Tuple[str, ...]]

    def neighbours(self, v: str) -> Tuple[str, ...]:
        return self.orders.get(v, ())

    def to_document(self) -> Dict[str, List[str]]:
        return {v: list(nbrs) for v, nbrs in sorted(self.orders.items())}

    @classmethod
    def from_document(cls, doc: Optional[Mapping[str, Sequence[str]]]) -> "RotationSnapshot":
        return cls({v: tuple(nbrs) for v, nbrs in (doc or {}).items()})


def orient2d(a, b, c) -> float:
    """Twice the signed area of abc; positive when counter-clockwise."""
    return float((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def incircle(a, b, c, d) -> float:
    """Positive when d lies inside the circle through counter-clockwise a, b, c."""
    m = np.array([
        [a[0] - d[0], a[1] - d[1], (a[0] - d[0]) ** 2 + (a[1] - d[1]) ** 2],
        [b[0] - d[0], b[1] - d[1], (b[0] - d[0]) ** 2 + (b[1] - d[1]) ** 2],
        [c[0] - d[0], c[1] - d[1], (c[0] - d[0]) ** 2 + (c[1] - d[1]) ** 2],
    ])
    return float(np.linalg.det(m))


def circumcenter(a, b, c) -> np.ndarray:
    a, b, c = (np.asarray(p, dtype=float) for p in (a, b, c))
    d = 2 * orient2d(a, b, c)
    sa, sb, sc = a @ a, b @ b, c @ c
    ux = (sa * (b[1] - c[1]) + sb * (c[1] - a[1]) + sc * (a[1] - b[1])) / d
    uy = (sa * (c[0] - b[0]) + sb * (a[0] - c[0]) + sc * (b[0] - a[0])) / d
    return np.array([ux, uy])


def normalize(coords: np.ndarray) -> np.ndarray:
    center = coords.mean(axis=0)
    scale = float(np.max(np.linalg.norm(coords - center, axis=1))) or 1.0
    return (coords - center) / (2 * scale)


def delaunay_triangles(coords: np.ndarray) -> List[Tuple[int, int, int]]:
    """Counter-clockwise Delaunay triangles; empty when the points are collinear."""
    if len(coords) < 3:
        return []
    unit = normalize(coords)
    if np.linalg.matrix_rank(unit - unit[0], tol=DEGENERACY_TOL) < 2:
        return []
    try:
        tri = Delaunay(coords)
    except QhullError as e:
        raise DegeneratePositionError(f"Delaunay triangulation failed: {e}") from e
    out = []
    for i, j, k in tri.simplices:
        area = orient2d(unit[i], unit[j], unit[k])
        if abs(area) < DEGENERACY_TOL:
            raise DegeneratePositionError("three collinear Delaunay neighbours; perturb the fixture")
        out.append((int(i), int(j), int(k)) if area > 0 else (int(i), int(k), int(j)))
    return out


def _check_cocircular(coords: np.ndarray, triangles: List[Tuple[int, int, int]], r: float):
    """Cocircular quadruples only matter when their shared circle fits inside a sensing ball."""
    unit = normalize(coords)
    opposite: Dict[Tuple[int, int], List[Tuple[Tuple[int, int, int], int]]] = {}
    for tri in triangles:
        for k in range(3):
            a, b = sorted((tri[k], tri[(k + 1) % 3]))
            opposite.setdefault((a, b), []).append((tri, tri[(k + 2) % 3]))
    for pair in opposite.values():
        if len(pair) != 2:
            continue
        (tri, _), (_, other) = pair
        a, b, c = tri
        if abs(incircle(unit[a], unit[b], unit[c], unit[other])) >= DEGENERACY_TOL:
            continue
        radius = float(np.linalg.norm(coords[a] - circumcenter(coords[a], coords[b], coords[c])))
        if radius <= r + CONTACT_TOL:
            raise DegeneratePositionError("four cocircular Delaunay points; perturb the fixture")


def _edge_reach(p: np.ndarray, q: np.ndarray, centers: List[Tuple[np.ndarray, float]],
                domain: Optional[Domain] = None) -> float:
    """
    Distance from p (equivalently q) to the Voronoi edge dual to pq, clipped
    to the domain; infinite when nothing of that edge lies in the domain.

    `centers` lists, per adjacent Delaunay triangle, its circumcenter and the
    signed offset of the opposite vertex along the bisector normal.
    """
    mid = (p + q) / 2
    direction = q - p
    normal = np.array([-direction[1], direction[0]]) / np.linalg.norm(direction)
    half = np.linalg.norm(direction) / 2
    offsets = [float((c - mid) @ normal) for c, _ in centers]
    if len(centers) == 2:
        lo, hi = min(offsets), max(offsets)
    elif len(centers) == 1:
        side = centers[0][1]
        lo, hi = (-np.inf, offsets[0]) if side > 0 else (offsets[0], np.inf)
    else:
        lo, hi = -np.inf, np.inf
    if domain is not None:
        inside = domain.chord(mid, normal, tol=CONTACT_TOL)
        if inside is None:
            return float("inf")
        lo, hi = max(lo, inside[0]), min(hi, inside[1])
        if lo > hi:
            return float("inf")
    s = min(max(0.0, lo), hi)
    return float(np.hypot(half, s))


def alpha_complex(points: Mapping[str, Sequence[float]], r: float, t: Optional[float] = None,
                  domain: Optional[Domain] = None) -> Tuple[SimplicialComplex, RotationSnapshot]:
    """
    Alpha complex at radius r and its rotation snapshot.

    Args:
        points: sensor id -> planar coordinates (general position)
        r: sensing radius
        t: optional time stamp carried on the complex
        domain: clip every Voronoi cell to it; the whole plane when omitted

    Returns:
        (complex, clockwise rotation snapshot of its 1-skeleton)
    """
    ids, coords = as_point_array(points)
    simplices: set = {(v,) for v in ids}
    triangles = delaunay_triangles(coords)
    _check_cocircular(coords, triangles, r)

    adjacent: Dict[Tuple[int, int], List[Tuple[np.ndarray, float]]] = {}
    for i, j, k in triangles:
        center = circumcenter(coords[i], coords[j], coords[k])
        radius = float(np.linalg.norm(coords[i] - center))
        if radius <= r + CONTACT_TOL and (domain is None or domain.contains(center, tol=CONTACT_TOL)):
            simplices.add(tuple(sorted((ids[i], ids[j], ids[k]))))
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            u, v = sorted((a, b))
            direction = coords[v] - coords[u]
            normal = np.array([-direction[1], direction[0]])
            side = float((coords[c] - (coords[u] + coords[v]) / 2) @ normal)
            adjacent.setdefault((u, v), []).append((center, side))

    if not triangles and len(ids) >= 2:
        # Collinear configuration: the triangulation is the path along the line.
        axis = coords[-1] - coords[0]
        order = np.argsort((coords - coords[0]) @ axis)
        for a, b in zip(order, order[1:]):
            adjacent[tuple(sorted((int(a), int(b))))] = []

    for (u, v), centers in adjacent.items():
        if _edge_reach(coords[u], coords[v], centers, domain) <= r + CONTACT_TOL:
            simplices.add(tuple(sorted((ids[u], ids[v]))))

    cx = SimplicialComplex.from_simplices(simplices, t=t)
    rotation = rotation_snapshot(cx, dict(zip(ids, coords)))
    logger.debug(f"alpha complex at t={t}: {cx.counts()}")
    return cx, rotation


def rotation_snapshot(cx: SimplicialComplex, coords: Mapping[str, np.ndarray]) -> RotationSnapshot:
    """Clockwise order of 1-skeleton neighbours read off the actual coordinates."""
    nbrs: Dict[str, List[str]] = {v: [] for v in cx.vertices}
    for u, v in cx.edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    orders = {}
    for v, around in nbrs.items():
        angle = {w: float(np.arctan2(coords[w][1] - coords[v][1], coords[w][0] - coords[v][0]))
                 for w in around}
        cw = sorted(around, key=lambda w: -angle[w])
        if cw:
            start = cw.index(min(cw))
            cw = cw[start:] + cw[:start]
        orders[v] = tuple(cw)
    return RotationSnapshot(orders)


def edges_cross(p1, p2, q1, q2) -> bool:
    """Proper crossing of segments p1p2 and q1q2 (shared endpoints do not count)."""
    d1 = orient2d(q1, q2, p1)
    d2 = orient2d(q1, q2, p2)
    d3 = orient2d(p1, p2, q1)
    d4 = orient2d(p1, p2, q2)
    return d1 * d2 < 0 and d3 * d4 < 0


def delaunay_edges(points: Mapping[str, Sequence[float]]) -> List[Simplex]:
    ids, coords = as_point_array(points)
    out = set()
    for tri in delaunay_triangles(coords):
        for k in range(3):
            out.add(tuple(sorted((ids[tri[k]], ids[tri[(k + 1) % 3]]))))
    return sorted(out)
