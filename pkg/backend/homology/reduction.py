"""
Column reduction of boundary matrices over F_p, homology bases and the maps
they induce.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Mapping, Optional, Tuple

import numpy as np

from core.errors import MalformedComplexError
from homology.chains import CellComplex, CellId
from homology.field import Chain, axpy, check_prime, inverse, low

logger = logging.getLogger(__name__)

# Complexes up to this many cells are reduced with dense numpy columns.
DENSE_LIMIT = 2000


def reduce_sparse(columns: List[Chain], p: int) -> Tuple[List[Chain], List[Chain]]:
    """
    Standard left-to-right column reduction R = D V.

    Returns:
        (R, V) as sparse columns; zero columns of R mark kernel vectors in V.
    """
    reduced: List[Chain] = []
    transform: List[Chain] = []
    pivot_of: Dict[int, int] = {}
    for j, col in enumerate(columns):
        col = dict(col)
        v: Chain = {j: 1}
        while col:
            pivot = low(col)
            k = pivot_of.get(pivot)
            if k is None:
                pivot_of[pivot] = j
                break
            factor = (-col[pivot] * inverse(reduced[k][pivot], p)) % p
            col = axpy(factor, reduced[k], col, p)
            v = axpy(factor, transform[k], v, p)
        reduced.append(col)
        transform.append(v)
    return reduced, transform


def reduce_dense(columns: List[Chain], n_rows: int, p: int) -> Tuple[List[Chain], List[Chain]]:
    """Same reduction on dense numpy columns; output is identical to reduce_sparse."""
    n = len(columns)
    d = np.zeros((n_rows, n), dtype=np.int64)
    for j, col in enumerate(columns):
        for i, a in col.items():
            d[i, j] = a % p
    v = np.eye(n, dtype=np.int64)
    pivot_of: Dict[int, int] = {}
    for j in range(n):
        while True:
            nz = np.flatnonzero(d[:, j])
            if not len(nz):
                break
            pivot = int(nz[-1])
            k = pivot_of.get(pivot)
            if k is None:
                pivot_of[pivot] = j
                break
            factor = (-int(d[pivot, j]) * inverse(int(d[pivot, k]), p)) % p
            d[:, j] = (d[:, j] + factor * d[:, k]) % p
            v[:, j] = (v[:, j] + factor * v[:, k]) % p

    def as_chains(m):
        return [{int(i): int(m[i, j]) for i in np.flatnonzero(m[:, j])} for j in range(m.shape[1])]

    return as_chains(d), as_chains(v)


def reduce_columns(columns: List[Chain], n_rows: int, p: int, method: Optional[str] = None):
    method = method or ("dense" if len(columns) + n_rows <= DENSE_LIMIT else "sparse")
    if method == "dense":
        return reduce_dense(columns, n_rows, p)
    return reduce_sparse(columns, p)


def rank_of(columns: List[Chain], n_rows: int, p: int, method: Optional[str] = None) -> int:
    reduced, _ = reduce_columns(columns, n_rows, p, method)
    return sum(1 for c in reduced if c)


@dataclass
class HomologyBasis:
    """
    H_j of a chain complex in echelon form: reduced boundaries of the
    (j+1)-cells followed by representative cycles, all with distinct lows.
    """
    degree: int
    p: int
    cells: List[CellId]
    representatives: List[Chain]
    _pivots: Dict[int, Tuple[str, int]] = field(default_factory=dict, repr=False)
    _vectors: Dict[Tuple[str, int], Chain] = field(default_factory=dict, repr=False)

    @property
    def betti(self) -> int:
        return len(self.representatives)

    def representative_chains(self) -> List[Dict[CellId, int]]:
        return [{self.cells[i]: a for i, a in sorted(z.items())} for z in self.representatives]

    def coordinates(self, cycle: Mapping[CellId, int]) -> List[int]:
        """Coefficients of a cycle's class in this basis."""
        index = {c: i for i, c in enumerate(self.cells)}
        vec: Chain = {}
        for c, a in cycle.items():
            if c not in index:
                raise MalformedComplexError(f"chain references cell {c} outside the complex")
            vec = axpy(a, {index[c]: 1}, vec, self.p)
        coords = [0] * self.betti
        while vec:
            pivot = low(vec)
            key = self._pivots.get(pivot)
            if key is None:
                raise MalformedComplexError(f"chain is not a {self.degree}-cycle")
            basis_vec = self._vectors[key]
            factor = (vec[pivot] * inverse(basis_vec[pivot], self.p)) % self.p
            if key[0] == "rep":
                coords[key[1]] = (coords[key[1]] + factor) % self.p
            vec = axpy(-factor, basis_vec, vec, self.p)
        return coords


def homology(c: CellComplex, j: int, p: int = 2, method: Optional[str] = None,
             relative: bool = False) -> HomologyBasis:
    """
    H_j(c; F_p), or H_j(c, marked; F_p) when `relative`.

    Args:
        c: the cell complex
        j: degree
        p: prime
        method: force "dense" or "sparse" reduction
        relative: quotient by the marked subcomplex

    Returns:
        HomologyBasis with betti number and representative cycles.
    """
    check_prime(p)
    if j < 0:
        raise ValueError("degree must be non-negative")

    def cells(k):
        ids = c.cells_of_dim(k)
        return [x for x in ids if x not in c.marked] if relative else ids

    lower, here, upper = cells(j - 1), cells(j), cells(j + 1)
    d_j = c.boundary_columns(j, p, rows=lower, cols=here)
    d_up = c.boundary_columns(j + 1, p, rows=here, cols=upper)
    r_j, v_j = reduce_columns(d_j, len(lower), p, method)
    r_up, _ = reduce_columns(d_up, len(here), p, method)

    basis = HomologyBasis(degree=j, p=p, cells=here, representatives=[])
    for k, col in enumerate(r_up):
        if col:
            basis._pivots[low(col)] = ("bd", k)
            basis._vectors[("bd", k)] = col
    for col, z in zip(r_j, v_j):
        if col:
            continue
        while z:
            key = basis._pivots.get(low(z))
            if key is None:
                break
            other = basis._vectors[key]
            z = axpy((-z[low(z)] * inverse(other[low(z)], p)) % p, other, z, p)
        if z:
            k = len(basis.representatives)
            basis.representatives.append(z)
            basis._pivots[low(z)] = ("rep", k)
            basis._vectors[("rep", k)] = z
    logger.debug(f"H_{j}{' (relative)' if relative else ''} over F_{p}: betti {basis.betti}")
    return basis


def betti_numbers(c: CellComplex, p: int = 2, method: Optional[str] = None) -> List[int]:
    return [homology(c, j, p, method).betti for j in range(c.dim + 1)]


def induced_map(source: CellComplex, target: CellComplex, j: int, p: int = 2,
                cell_map: Optional[Mapping[Hashable, Hashable]] = None,
                source_basis: Optional[HomologyBasis] = None,
                target_basis: Optional[HomologyBasis] = None) -> np.ndarray:
    """
    Matrix of H_j(source) -> H_j(target) for a cellular embedding.

    Args:
        source, target: cell complexes
        j: degree
        p: prime
        cell_map: source cell -> target cell; identity on ids when omitted
        source_basis, target_basis: precomputed bases to reuse

    Returns:
        (betti_target x betti_source) integer matrix mod p.
    """
    cell_map = cell_map or {}
    mapped = {c: cell_map.get(c, c) for c in source.cells}
    if len(set(mapped.values())) != len(mapped):
        raise MalformedComplexError("cell map is not injective")
    for c, image in mapped.items():
        if image not in target.cells or target.cells[image].dim != source.cells[c].dim:
            raise MalformedComplexError(f"cell {c} has no image of matching dimension")
        pushed = {mapped[f]: a % p for f, a in source.cells[c].boundary.items() if a % p}
        expected = {f: a % p for f, a in target.cells[image].boundary.items() if a % p}
        if pushed != expected:
            raise MalformedComplexError(f"embedding does not commute with the boundary at {c}")
    sb = source_basis or homology(source, j, p)
    tb = target_basis or homology(target, j, p)
    out = np.zeros((tb.betti, sb.betti), dtype=np.int64)
    for k, z in enumerate(sb.representative_chains()):
        out[:, k] = tb.coordinates({mapped[c]: a for c, a in z.items()})
    return out


def matrix_rank(m: np.ndarray, p: int) -> int:
    """Rank of a dense matrix over F_p."""
    if m.size == 0:
        return 0
    columns = [{int(i): int(m[i, j]) % p for i in np.flatnonzero(m[:, j] % p)} for j in range(m.shape[1])]
    return rank_of(columns, m.shape[0], p, method="sparse")


def coordinates_matrix(basis: HomologyBasis, cycles: List[Dict[CellId, int]]) -> np.ndarray:
    out = np.zeros((basis.betti, len(cycles)), dtype=np.int64)
    for k, z in enumerate(cycles):
        out[:, k] = basis.coordinates(z)
    return out