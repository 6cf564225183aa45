"""
Abstract simplicial complexes over sensor identifiers, plus the smallest
enclosing ball test that decides Čech membership.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.errors import AssumptionViolation, MalformedComplexError

logger = logging.getLogger(__name__)

Simplex = Tuple[str, ...]

# Closed balls: a ball that exactly touches still counts.
CONTACT_TOL = 1e-12


def make_simplex(vertices: Iterable[str]) -> Simplex:
    simplex = tuple(sorted(vertices))
    if not simplex:
        raise MalformedComplexError("empty simplex")
    if len(set(simplex)) != len(simplex):
        raise MalformedComplexError(f"repeated vertex in simplex {simplex}")
    return simplex


def faces(simplex: Simplex) -> List[Simplex]:
    """Codimension-one faces, in the order used by the boundary operator."""
    if len(simplex) == 1:
        return []
    return [simplex[:k] + simplex[k + 1:] for k in range(len(simplex))]


def closure(simplices: Iterable[Simplex]) -> FrozenSet[Simplex]:
    out = set()
    for s in simplices:
        s = make_simplex(s)
        for size in range(1, len(s) + 1):
            out.update(itertools.combinations(s, size))
    return frozenset(out)


def dimension_key(simplex: Simplex) -> Tuple[int, Simplex]:
    return (len(simplex) - 1, simplex)


@dataclass(frozen=True)
class SimplicialComplex:
    simplices: FrozenSet[Simplex]
    t: Optional[float] = None

    @classmethod
    def from_simplices(cls, simplices: Iterable[Sequence[str]], t: Optional[float] = None,
                       close: bool = True) -> "SimplicialComplex":
        normalized = frozenset(make_simplex(s) for s in simplices)
        if close:
            normalized = closure(normalized)
        cx = cls(normalized, t)
        if not close:
            cx.check_closed()
        return cx

    def check_closed(self):
        for s in self.simplices:
            for f in faces(s):
                if f not in self.simplices:
                    raise MalformedComplexError(f"face {f} of {s} missing")

    def __contains__(self, simplex) -> bool:
        return tuple(sorted(simplex)) in self.simplices

    def __len__(self) -> int:
        return len(self.simplices)

    @property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def of_dim(self, k: int) -> List[Simplex]:
        return sorted(s for s in self.simplices if len(s) == k + 1)

    @property
    def vertices(self) -> List[str]:
        return [s[0] for s in self.of_dim(0)]

    @property
    def edges(self) -> List[Simplex]:
        return self.of_dim(1)

    def ordered(self) -> List[Simplex]:
        return sorted(self.simplices, key=dimension_key)

    def union(self, other: "SimplicialComplex") -> "SimplicialComplex":
        return SimplicialComplex(self.simplices | other.simplices)

    def skeleton(self, k: int) -> "SimplicialComplex":
        return SimplicialComplex(frozenset(s for s in self.simplices if len(s) <= k + 1), self.t)

    def counts(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for s in self.simplices:
            out[len(s) - 1] = out.get(len(s) - 1, 0) + 1
        return out


def as_point_array(points: Mapping[str, Sequence[float]]) -> Tuple[List[str], np.ndarray]:
    """Sorted ids and their coordinates; rejects coincident points."""
    ids = sorted(points)
    coords = np.array([points[i] for i in ids], dtype=float).reshape(len(ids), -1)
    if len(ids) >= 2:
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.linalg.norm(diff, axis=2) + np.eye(len(ids))
        if np.min(dist) <= 1e-12:
            a, b = np.unravel_index(np.argmin(dist), dist.shape)
            raise AssumptionViolation(f"coincident points: {ids[a]} and {ids[b]}")
    return ids, coords


def _circumball(support: List[np.ndarray]) -> Tuple[Optional[np.ndarray], float]:
    if not support:
        return None, -1.0
    p0 = support[0]
    if len(support) == 1:
        return p0, 0.0
    a = np.array([p - p0 for p in support[1:]])
    gram = a @ a.T
    rhs = 0.5 * np.einsum("ij,ij->i", a, a)
    lam, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
    center = p0 + a.T @ lam
    return center, float(np.linalg.norm(support[0] - center))


def _welzl(pts: List[np.ndarray], support: List[np.ndarray], dim: int) -> Tuple[Optional[np.ndarray], float]:
    if not pts or len(support) == dim + 1:
        return _circumball(support)
    p = pts[-1]
    center, radius = _welzl(pts[:-1], support, dim)
    if center is not None and np.linalg.norm(p - center) <= radius + CONTACT_TOL:
        return center, radius
    return _welzl(pts[:-1], support + [p], dim)


def minimal_enclosing_radius(coords: np.ndarray) -> float:
    """
    Radius of the smallest ball containing every row of `coords`.

    Welzl's recursion; exact up to floating point for the handful of points
    a simplex carries.
    """
    coords = np.asarray(coords, dtype=float)
    if len(coords) == 0:
        return 0.0
    _, radius = _welzl(list(coords), [], coords.shape[1])
    return radius
