"""
The stacked complex of an event stream: prisms σ x [t_i, t_{i+1}] glued along
the slices at the event times, with the fence prisms F x I marked.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

from complexes.simplicial import Simplex, SimplicialComplex, faces
from complexes.stream import SimplicialEventStream
from homology.chains import CellComplex

logger = logging.getLogger(__name__)


def slice_cell(simplex: Simplex, k: int) -> Tuple:
    """σ x {τ_k}, where τ_0 = 0, τ_k = t_k and τ_{n+1} = 1."""
    return ("slice", k, simplex)


def prism_cell(simplex: Simplex, i: int) -> Tuple:
    """σ x [τ_i, τ_{i+1}]."""
    return ("prism", i, simplex)


@dataclass
class StackedComplex:
    cells: CellComplex
    times: List[float]  # τ_0 = 0, t_1, ..., t_n, τ_{n+1} = 1
    slices: List[SimplicialComplex]  # complex sitting over each τ_k
    blocks: List[SimplicialComplex]  # C(s_i) over block i
    fence: Tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.blocks) - 1

    def slice_map(self, i: int) -> Dict[Simplex, Tuple]:
        """C(s_i) into the stacked complex, at the bottom of block i."""
        return {s: slice_cell(s, i) for s in self.blocks[i].simplices}

    def counts(self) -> Dict[str, int]:
        out = {"slice": 0, "prism": 0}
        for cid in self.cells.cells:
            out[cid[0]] += 1
        return out


def build_stacked_complex(es: SimplicialEventStream) -> StackedComplex:
    """
    Cellular stacked complex of a pure-add/pure-remove stream.

    The slice over event time t_k is the larger of C(s_{k-1}) and C(s_k);
    prism boundaries follow ∂(σ x I) = (∂σ) x I + (-1)^dim σ (σ x {top} - σ x {bottom}).
    """
    es.require_pure()
    blocks = es.slices()
    slices = [blocks[0]] + es.unions() + [blocks[-1]]
    times = [0.0] + list(es.grid.event_times) + [1.0]
    fence = set(es.fence)

    def fenced(simplex):
        return bool(fence) and set(simplex) <= fence

    cells = CellComplex()
    # Slice and prism cells are interleaved by dimension so faces always precede cofaces.
    top_dim = max((cx.dim for cx in slices), default=-1)
    for dim in range(top_dim + 2):
        for k, cx in enumerate(slices):
            for s in cx.of_dim(dim):
                boundary = {slice_cell(f, k): (-1) ** m for m, f in enumerate(faces(s))}
                cells.add_cell(slice_cell(s, k), dim, boundary, marked=fenced(s))
        if dim == 0:
            continue
        for i, cx in enumerate(blocks):
            for s in cx.of_dim(dim - 1):
                sign = (-1) ** (dim - 1)
                boundary = {prism_cell(f, i): (-1) ** m for m, f in enumerate(faces(s))}
                boundary[slice_cell(s, i + 1)] = sign
                boundary[slice_cell(s, i)] = -sign
                cells.add_cell(prism_cell(s, i), dim, boundary, marked=fenced(s))

    sc = StackedComplex(cells=cells, times=times, slices=slices, blocks=blocks, fence=tuple(sorted(fence)))
    logger.info(f"Stacked complex: {sc.counts()} cells over {es.n} events, {len(cells.marked)} fence cells")
    return sc
