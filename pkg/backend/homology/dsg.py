"""
Relative-homology criterion on the stacked complex: a relative d-class whose
boundary is nonzero in H_{d-1}(F x I) certifies that no evasion path exists.
"""
import logging
from dataclasses import dataclass

from core.errors import EmptyFenceError, MalformedComplexError
from homology.reduction import coordinates_matrix, homology, induced_map, matrix_rank
from homology.stacked import StackedComplex

logger = logging.getLogger(__name__)

NO_EVASION_CERTIFIED = "no_evasion_certified"
INCONCLUSIVE = "inconclusive"


def check_exactness(connecting_rank: int, kernel_rank: int) -> None:
    """The long exact sequence of the pair forces both ranks to coincide."""
    if connecting_rank != kernel_rank:
        logger.error(f"connecting map rank {connecting_rank} disagrees with inclusion kernel {kernel_rank}")
        raise MalformedComplexError(
            f"sequence of the pair is not exact: connecting rank {connecting_rank}, inclusion kernel {kernel_rank}")


@dataclass
class DsgResult:
    verdict: str
    connecting_rank: int
    relative_dim: int  # dim H_d(SC, F x I)
    fence_dim: int  # dim H_{d-1}(F x I)
    kernel_rank: int  # dim ker H_{d-1}(F x I) -> H_{d-1}(SC)


def dsg_criterion(sc: StackedComplex, d: int = 2, p: int = 2) -> DsgResult:
    """
    Rank of the connecting map H_d(SC, F x I) -> H_{d-1}(F x I) over F_p.

    By exactness it also equals the kernel of H_{d-1}(F x I) -> H_{d-1}(SC);
    both are computed and must agree.
    """
    cells = sc.cells
    if not cells.marked:
        raise EmptyFenceError("stacked complex has no fence cells")

    relative = homology(cells, d, p, relative=True)
    fence_cx = cells.marked_subcomplex()
    fence_basis = homology(fence_cx, d - 1, p)

    boundaries = [cells.chain_boundary(z, p) for z in relative.representative_chains()]
    connecting = coordinates_matrix(fence_basis, boundaries)
    rank = matrix_rank(connecting, p)

    inclusion = induced_map(fence_cx, cells, d - 1, p, source_basis=fence_basis)
    kernel = fence_basis.betti - matrix_rank(inclusion, p)
    check_exactness(rank, kernel)

    verdict = NO_EVASION_CERTIFIED if rank > 0 else INCONCLUSIVE
    logger.info(f"dsg criterion over F_{p}: connecting rank {rank} -> {verdict}")
    return DsgResult(verdict=verdict, connecting_rank=rank, relative_dim=relative.betti,
                     fence_dim=fence_basis.betti, kernel_rank=kernel)
