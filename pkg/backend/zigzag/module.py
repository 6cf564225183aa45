"""
Zigzag modules over F_p and their barcodes. Slots are numbered from 1.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from homology.field import check_prime
from homology.linalg import rank

logger = logging.getLogger(__name__)

RIGHT = "right"  # V_k -> V_{k+1}
LEFT = "left"  # V_k <- V_{k+1}

Interval = Tuple[int, int]


@dataclass(frozen=True)
class Arrow:
    direction: str
    matrix: np.ndarray


@dataclass
class ZigzagModule:
    dims: List[int]
    arrows: List[Arrow]
    p: int = 2
    slot_times: List[float] = field(default_factory=list)

    def __post_init__(self):
        check_prime(self.p)
        if len(self.arrows) != max(len(self.dims) - 1, 0):
            raise ValueError(f"{len(self.dims)} slots need {len(self.dims) - 1} arrows, got {len(self.arrows)}")
        for k, arrow in enumerate(self.arrows):
            src, dst = (k, k + 1) if arrow.direction == RIGHT else (k + 1, k)
            expected = (self.dims[dst], self.dims[src])
            if arrow.direction not in (RIGHT, LEFT):
                raise ValueError(f"arrow {k + 1}: bad direction {arrow.direction}")
            if tuple(arrow.matrix.shape) != expected:
                raise ValueError(f"arrow {k + 1}: matrix shape {arrow.matrix.shape}, expected {expected}")

    @property
    def length(self) -> int:
        return len(self.dims)

    def restrict(self, b: int, d: int) -> "ZigzagModule":
        """Sub-diagram on slots b..d."""
        times = self.slot_times[b - 1:d] if self.slot_times else []
        return ZigzagModule(self.dims[b - 1:d], self.arrows[b - 1:d - 1], self.p, times)

    def dual(self) -> "ZigzagModule":
        """Contravariant module: every arrow reversed and transposed."""
        flipped = [Arrow(LEFT if a.direction == RIGHT else RIGHT, a.matrix.T.copy()) for a in self.arrows]
        return ZigzagModule(list(self.dims), flipped, self.p, list(self.slot_times))

    def directions(self) -> List[str]:
        return [a.direction for a in self.arrows]


def interval_module(b: int, d: int, directions: Sequence[str], p: int = 2) -> ZigzagModule:
    """I(b, d) on len(directions) + 1 slots."""
    m = len(directions) + 1
    dims = [1 if b <= k <= d else 0 for k in range(1, m + 1)]
    arrows = []
    for k, direction in enumerate(directions):
        src, dst = (k, k + 1) if direction == RIGHT else (k + 1, k)
        mat = np.ones((dims[dst], dims[src]), dtype=np.int64)
        arrows.append(Arrow(direction, mat))
    return ZigzagModule(dims, arrows, p)


def direct_sum(modules: Iterable[ZigzagModule]) -> ZigzagModule:
    modules = list(modules)
    first = modules[0]
    dims = [sum(mod.dims[k] for mod in modules) for k in range(first.length)]
    arrows = []
    for k, arrow in enumerate(first.arrows):
        blocks = [mod.arrows[k].matrix for mod in modules]
        rows = sum(b.shape[0] for b in blocks)
        cols = sum(b.shape[1] for b in blocks)
        mat = np.zeros((rows, cols), dtype=np.int64)
        r = c = 0
        for blk in blocks:
            mat[r:r + blk.shape[0], c:c + blk.shape[1]] = blk
            r += blk.shape[0]
            c += blk.shape[1]
        arrows.append(Arrow(arrow.direction, mat))
    return ZigzagModule(dims, arrows, first.p)


def random_module(rng: np.random.Generator, length: int, max_dim: int, p: int = 2,
                  max_total: Optional[int] = None) -> ZigzagModule:
    """Random dims, directions and matrices; used by the property tests."""
    while True:
        dims = [int(x) for x in rng.integers(0, max_dim + 1, size=length)]
        if max_total is None or sum(dims) <= max_total:
            break
    arrows = []
    for k in range(length - 1):
        direction = RIGHT if rng.random() < 0.5 else LEFT
        src, dst = (k, k + 1) if direction == RIGHT else (k + 1, k)
        mat = rng.integers(0, p, size=(dims[dst], dims[src])).astype(np.int64)
        arrows.append(Arrow(direction, mat))
    return ZigzagModule(dims, arrows, p)


@dataclass
class Barcode:
    m: int
    intervals: List[Interval]
    p: int = 2
    degree: Optional[int] = None
    slot_times: List[float] = field(default_factory=list)

    def __post_init__(self):
        self.intervals = sorted((int(b), int(d)) for b, d in self.intervals)
        for b, d in self.intervals:
            if not 1 <= b <= d <= self.m:
                raise ValueError(f"interval [{b},{d}] outside slots 1..{self.m}")

    def multiset(self) -> Counter:
        return Counter(self.intervals)

    def __eq__(self, other) -> bool:
        return isinstance(other, Barcode) and self.m == other.m and self.intervals == other.intervals

    def dims(self) -> List[int]:
        return [sum(1 for b, d in self.intervals if b <= k <= d) for k in range(1, self.m + 1)]

    def full_length(self) -> List[Interval]:
        return [iv for iv in self.intervals if iv == (1, self.m)]

    def check_consistency(self, z: ZigzagModule):
        """Raise unless slot dimensions and arrow ranks match the module."""
        if z.length != self.m:
            raise ValueError(f"barcode over {self.m} slots, module over {z.length}")
        if self.dims() != list(z.dims):
            raise ValueError(f"barcode dims {self.dims()} != module dims {z.dims}")
        for k, arrow in enumerate(z.arrows, start=1):
            expected = sum(1 for b, d in self.intervals if b <= k and d >= k + 1)
            got = rank(arrow.matrix, z.p) if arrow.matrix.size else 0
            if got != expected:
                raise ValueError(f"arrow {k}: rank {got}, barcode predicts {expected}")