"""
Finite cell complexes with boundaries given as formal sums over F_p.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Optional, Set

from complexes.simplicial import SimplicialComplex, faces
from core.errors import MalformedComplexError
from homology.field import Chain, axpy, check_prime

logger = logging.getLogger(__name__)

CellId = Hashable


@dataclass
class Cell:
    id: CellId
    dim: int
    boundary: Dict[CellId, int] = field(default_factory=dict)  # integer coefficients, reduced mod p on use


class CellComplex:
    """
    Cells in insertion order; every boundary must reference earlier
    cells of one lower dimension. `marked` holds a subcomplex (e.g. F x I).
    """

    def __init__(self):
        self.cells: Dict[CellId, Cell] = {}
        self.marked: Set[CellId] = set()
        self._by_dim: Dict[int, List[CellId]] = {}
        self._index: Dict[CellId, int] = {}

    def add_cell(self, cell_id: CellId, dim: int, boundary: Optional[Dict[CellId, int]] = None,
                 marked: bool = False):
        if cell_id in self.cells:
            raise MalformedComplexError(f"duplicate cell {cell_id}")
        boundary = {k: v for k, v in (boundary or {}).items() if v}
        for face_id in boundary:
            face = self.cells.get(face_id)
            if face is None:
                raise MalformedComplexError(f"cell {cell_id} references unknown cell {face_id}")
            if face.dim != dim - 1:
                raise MalformedComplexError(f"cell {cell_id} of dim {dim} has boundary cell {face_id} of dim {face.dim}")
        self.cells[cell_id] = Cell(cell_id, dim, boundary)
        bucket = self._by_dim.setdefault(dim, [])
        self._index[cell_id] = len(bucket)
        bucket.append(cell_id)
        if marked:
            self.marked.add(cell_id)

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def dim(self) -> int:
        return max(self._by_dim, default=-1)

    def cells_of_dim(self, k: int) -> List[CellId]:
        return list(self._by_dim.get(k, []))

    def index_of(self, cell_id: CellId) -> int:
        return self._index[cell_id]

    def boundary_columns(self, k: int, p: int, rows: Optional[List[CellId]] = None,
                         cols: Optional[List[CellId]] = None) -> List[Chain]:
        """∂_k as sparse columns over F_p, optionally restricted to given rows and columns."""
        rows = self.cells_of_dim(k - 1) if rows is None else rows
        cols = self.cells_of_dim(k) if cols is None else cols
        row_index = {c: i for i, c in enumerate(rows)}
        out = []
        for c in cols:
            chain: Chain = {}
            for face, coeff in self.cells[c].boundary.items():
                if face in row_index:
                    chain = axpy(coeff, {row_index[face]: 1}, chain, p)
            out.append(chain)
        return out

    def chain_boundary(self, chain: Dict[CellId, int], p: int) -> Dict[CellId, int]:
        out: Dict[CellId, int] = {}
        for c, a in chain.items():
            for face, coeff in self.cells[c].boundary.items():
                s = (out.get(face, 0) + a * coeff) % p
                if s:
                    out[face] = s
                else:
                    out.pop(face, None)
        return out

    def check(self, p: int = 2):
        """Raise unless ∂∘∂ = 0 over F_p."""
        check_prime(p)
        for cell in self.cells.values():
            if cell.dim < 2:
                continue
            if self.chain_boundary(cell.boundary, p):
                raise MalformedComplexError(f"∂∂ != 0 on cell {cell.id} over F_{p}")
        for c in self.marked:
            for face in self.cells[c].boundary:
                if face not in self.marked:
                    raise MalformedComplexError(f"marked cell {c} has unmarked face {face}")

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(ids) for k, ids in self._by_dim.items())

    def subcomplex(self, ids: Iterable[CellId]) -> "CellComplex":
        """The cells in `ids`, which must contain every face of every kept cell."""
        keep = set(ids)
        sub = CellComplex()
        for c in self.cells.values():
            if c.id not in keep:
                continue
            outside = [f for f, v in c.boundary.items() if v and f not in keep]
            if outside:
                raise MalformedComplexError(f"cell {c.id} has faces outside the subcomplex: {outside[:3]}")
            sub.add_cell(c.id, c.dim, {f: v for f, v in c.boundary.items() if v}, marked=c.id in self.marked)
        return sub

    def marked_subcomplex(self) -> "CellComplex":
        return self.subcomplex(self.marked)

    @classmethod
    def from_simplicial(cls, cx: SimplicialComplex) -> "CellComplex":
        """Oriented simplicial chain complex; cell ids are the sorted vertex tuples."""
        out = cls()
        for s in cx.ordered():
            out.add_cell(s, len(s) - 1, simplex_boundary(s))
        return out


def simplex_boundary(simplex) -> Dict:
    return {f: (-1) ** k for k, f in enumerate(faces(tuple(simplex)))}
