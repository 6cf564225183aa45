"""
Interval decomposition of zigzag modules.

`decompose` counts, for every slot range [b, d], the summands covering it as
the rank of the limit-to-colimit map of the restricted diagram; exact
multiplicities follow by inclusion-exclusion. `brute_force_decompose` is an
independent exhaustive search over F_2 used to cross-check it.
"""
import itertools
import logging
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from core.errors import SizeLimitExceeded
from homology.linalg import nullspace, rank
from zigzag.module import LEFT, RIGHT, Arrow, Barcode, ZigzagModule

logger = logging.getLogger(__name__)

BRUTE_FORCE_LIMIT = 14


def _offsets(dims: List[int]) -> List[int]:
    return [0] + list(np.cumsum(dims))


def covering_count(z: ZigzagModule) -> int:
    """Number of full-length summands: rank of lim z -> colim z."""
    dims = z.dims
    if not dims or min(dims) == 0:
        return 0
    p = z.p
    off = _offsets(dims)
    total = off[-1]

    constraints, relations = [], []
    for k, arrow in enumerate(z.arrows):
        src, dst = (k, k + 1) if arrow.direction == RIGHT else (k + 1, k)
        a = arrow.matrix % p
        block = np.zeros((dims[dst], total), dtype=np.int64)
        block[:, off[src]:off[src + 1]] = a
        block[:, off[dst]:off[dst + 1]] -= np.eye(dims[dst], dtype=np.int64)
        constraints.append(block % p)
        rel = np.zeros((total, dims[src]), dtype=np.int64)
        rel[off[src]:off[src + 1], :] = np.eye(dims[src], dtype=np.int64)
        rel[off[dst]:off[dst + 1], :] -= a
        relations.append(rel % p)

    system = np.vstack(constraints) if constraints else np.zeros((0, total), dtype=np.int64)
    families = nullspace(system, p)
    if families.shape[1] == 0:
        return 0
    # A compatible family is sent to the class of its first component.
    firsts = np.zeros((total, families.shape[1]), dtype=np.int64)
    firsts[:dims[0], :] = families[:dims[0], :]
    rel = np.hstack(relations) if relations else np.zeros((total, 0), dtype=np.int64)
    base = rank(rel, p) if rel.size else 0
    return rank(np.hstack([rel, firsts]), p) - base


def decompose(z: ZigzagModule) -> Barcode:
    """Barcode of z, intervals sorted by (b, d)."""
    m = z.length
    cover: Dict[Tuple[int, int], int] = {}
    for b in range(1, m + 1):
        for d in range(b, m + 1):
            c = covering_count(z.restrict(b, d))
            cover[(b, d)] = c
            if c == 0:
                # Ranges further right are covered by even fewer summands.
                for rest in range(d + 1, m + 1):
                    cover[(b, rest)] = 0
                break

    def count(b, d):
        if b < 1 or d > m:
            return 0
        return cover[(b, d)]

    intervals = []
    for b in range(1, m + 1):
        for d in range(b, m + 1):
            mult = count(b, d) - count(b - 1, d) - count(b, d + 1) + count(b - 1, d + 1)
            if mult < 0:
                raise ArithmeticError(f"negative multiplicity for [{b},{d}]")
            intervals.extend([(b, d)] * mult)
    return Barcode(m, intervals, z.p, slot_times=list(z.slot_times))


def _vectors(dim: int) -> Iterator[np.ndarray]:
    for bits in itertools.product((0, 1), repeat=dim):
        yield np.array(bits, dtype=np.int64)


def _interval_families(z: ZigzagModule, b: int, d: int) -> Iterator[List[np.ndarray]]:
    """Nonzero compatible vector families (x_b..x_d) spanning an interval submodule."""
    dims = z.dims

    def extend(prefix: List[np.ndarray], k: int):
        if k > d:
            yield prefix
            return
        if k == b:
            options = [v for v in _vectors(dims[k - 1]) if v.any()]
        else:
            arrow = z.arrows[k - 2]
            if arrow.direction == RIGHT:
                image = (arrow.matrix @ prefix[-1]) % 2
                options = [image] if image.any() else []
            else:
                options = [v for v in _vectors(dims[k - 1])
                           if v.any() and np.array_equal((arrow.matrix @ v) % 2, prefix[-1])]
        for v in options:
            yield from extend(prefix + [v], k + 1)

    for family in extend([], b):
        # Submodule: nothing may leave the interval.
        if b > 1 and z.arrows[b - 2].direction == LEFT and ((z.arrows[b - 2].matrix @ family[0]) % 2).any():
            continue
        if d < z.length and z.arrows[d - 1].direction == RIGHT and ((z.arrows[d - 1].matrix @ family[-1]) % 2).any():
            continue
        yield family


def _retraction(z: ZigzagModule, b: int, d: int, family: List[np.ndarray]) -> Optional[List[np.ndarray]]:
    """Functionals (φ_b..φ_d) forming a module map z -> I(b, d) with φ_k(x_k) = 1."""
    dims = z.dims

    def extend(prefix: List[np.ndarray], k: int):
        if k > d:
            yield prefix
            return
        if k == b:
            options = list(_vectors(dims[k - 1]))
        else:
            arrow = z.arrows[k - 2]
            if arrow.direction == LEFT:
                options = [(prefix[-1] @ arrow.matrix) % 2]
            else:
                options = [phi for phi in _vectors(dims[k - 1])
                           if np.array_equal((phi @ arrow.matrix) % 2, prefix[-1])]
        for phi in options:
            if int(phi @ family[k - b]) % 2 == 1:
                yield from extend(prefix + [phi], k + 1)

    for phis in extend([], b):
        if b > 1 and z.arrows[b - 2].direction == RIGHT and ((phis[0] @ z.arrows[b - 2].matrix) % 2).any():
            continue
        if d < z.length and z.arrows[d - 1].direction == LEFT and ((phis[-1] @ z.arrows[d - 1].matrix) % 2).any():
            continue
        return phis
    return None


def _kernel_module(z: ZigzagModule, b: int, d: int, phis: List[np.ndarray]) -> ZigzagModule:
    """The complement ker(retraction) as a module in its own bases."""
    bases = []
    for k in range(1, z.length + 1):
        if b <= k <= d:
            bases.append(nullspace(phis[k - b].reshape(1, -1), 2))
        else:
            bases.append(np.eye(z.dims[k - 1], dtype=np.int64))
    arrows = []
    for k, arrow in enumerate(z.arrows):
        src, dst = (k, k + 1) if arrow.direction == RIGHT else (k + 1, k)
        image = (arrow.matrix @ bases[src]) % 2
        coords = np.zeros((bases[dst].shape[1], bases[src].shape[1]), dtype=np.int64)
        for col in range(image.shape[1]):
            coords[:, col] = _coordinates(bases[dst], image[:, col])
        arrows.append(Arrow(arrow.direction, coords))
    return ZigzagModule([bs.shape[1] for bs in bases], arrows, 2)


def _coordinates(basis: np.ndarray, v: np.ndarray) -> np.ndarray:
    for bits in itertools.product((0, 1), repeat=basis.shape[1]):
        c = np.array(bits, dtype=np.int64)
        if np.array_equal((basis @ c) % 2 if basis.shape[1] else np.zeros_like(v), v % 2):
            return c
    raise ArithmeticError("vector outside the complement; retraction is not a module map")


def brute_force_decompose(z: ZigzagModule) -> Barcode:
    """
    Exhaustive interval extraction over F_2.

    Repeatedly finds an interval submodule together with a retraction onto it,
    records the interval and continues with the kernel of the retraction.
    """
    if z.p != 2:
        raise ValueError("brute-force decomposition works over F_2 only")
    if sum(z.dims) > BRUTE_FORCE_LIMIT:
        raise SizeLimitExceeded(f"total dimension {sum(z.dims)} exceeds {BRUTE_FORCE_LIMIT}")
    intervals = []
    current = ZigzagModule(list(z.dims), [Arrow(a.direction, a.matrix % 2) for a in z.arrows], 2)
    while sum(current.dims):
        found = None
        for b in range(1, current.length + 1):
            for d in range(b, current.length + 1):
                if min(current.dims[b - 1:d]) == 0:
                    break
                for family in _interval_families(current, b, d):
                    phis = _retraction(current, b, d, family)
                    if phis is not None:
                        found = (b, d, phis)
                        break
                if found:
                    break
            if found:
                break
        if found is None:
            raise ArithmeticError("no interval summand found")
        b, d, phis = found
        intervals.append((b, d))
        current = _kernel_module(current, b, d, phis)
    return Barcode(z.length, intervals, 2, slot_times=list(z.slot_times))
