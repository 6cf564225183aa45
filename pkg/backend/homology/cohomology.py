"""
Simplicial cohomology over F_p, computed as homology of the cochain complex,
and restriction maps along inclusions.
"""
import logging
from typing import Optional

import numpy as np

from complexes.simplicial import SimplicialComplex, faces
from homology.chains import CellComplex
from homology.reduction import HomologyBasis, homology

logger = logging.getLogger(__name__)


def cochain_complex(cx: SimplicialComplex) -> CellComplex:
    """
    Cochains of cx as a cell complex: a j-simplex becomes a cell of degree
    D - j (D = dim cx) whose boundary is its coboundary.
    """
    top = cx.dim
    cofaces = {s: {} for s in cx.simplices}
    for s in cx.simplices:
        for k, f in enumerate(faces(s)):
            cofaces[f][s] = (-1) ** k
    out = CellComplex()
    for s in sorted(cx.simplices, key=lambda s: (-len(s), s)):
        out.add_cell(s, top - (len(s) - 1), cofaces[s])
    return out


def cohomology(cx: SimplicialComplex, j: int, p: int = 2) -> HomologyBasis:
    """H^j(cx; F_p) with representative cocycles keyed by simplex."""
    top = cx.dim
    if j > top:
        return HomologyBasis(degree=j, p=p, cells=[], representatives=[])
    return homology(cochain_complex(cx), top - j, p)


def restriction_map(big: SimplicialComplex, small: SimplicialComplex, j: int, p: int = 2,
                    big_basis: Optional[HomologyBasis] = None,
                    small_basis: Optional[HomologyBasis] = None) -> np.ndarray:
    """Matrix of H^j(big) -> H^j(small) induced by small ⊆ big."""
    bb = big_basis or cohomology(big, j, p)
    sb = small_basis or cohomology(small, j, p)
    out = np.zeros((sb.betti, bb.betti), dtype=np.int64)
    keep = set(small.simplices)
    for k, phi in enumerate(bb.representative_chains()):
        out[:, k] = sb.coordinates({s: a for s, a in phi.items() if s in keep})
    return out
