"""
Dense linear algebra over F_p on small numpy integer matrices.
"""
from typing import List, Optional, Tuple

import numpy as np

from homology.field import inverse


def as_field(m, p: int, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
    arr = np.asarray(m, dtype=np.int64)
    if shape is not None:
        arr = arr.reshape(shape)
    return arr % p


def rref(m: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form mod p.

    Returns:
        (R, pivot_cols) with len(pivot_cols) the rank.
    """
    r = as_field(m, p).copy()
    rows, cols = r.shape
    pivots: List[int] = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        nz = np.flatnonzero(r[row:, col])
        if not len(nz):
            continue
        found = row + int(nz[0])
        if found != row:
            r[[row, found]] = r[[found, row]]
        r[row] = (r[row] * inverse(int(r[row, col]), p)) % p
        for other in np.flatnonzero(r[:, col]):
            if other != row:
                r[other] = (r[other] - r[other, col] * r[row]) % p
        pivots.append(col)
        row += 1
    return r, pivots


def rank(m: np.ndarray, p: int) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(rref(m, p)[1])


def nullspace(m: np.ndarray, p: int) -> np.ndarray:
    """Basis of {x : m x = 0} as the columns of an (n x k) matrix; m must be 2-D."""
    m = np.asarray(m, dtype=np.int64)
    n = m.shape[1]
    if m.shape[0] == 0 or n == 0:
        return np.eye(n, dtype=np.int64)
    r, pivots = rref(m, p)
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for i, pc in enumerate(pivots):
            basis[pc, k] = (-r[i, f]) % p
    return basis


def solve(a: np.ndarray, b: np.ndarray, p: int) -> Optional[np.ndarray]:
    """One solution of a x = b mod p, or None."""
    a = as_field(a, p)
    b = as_field(b, p).reshape(-1, 1)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.zeros(n, dtype=np.int64)
    r, pivots = rref(np.hstack([a, b]), p)
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = r[i, n]
    return x


def complement_basis(span: np.ndarray, dim: int, p: int) -> np.ndarray:
    """Standard basis vectors extending the column span of `span` to F_p^dim."""
    cols = [span[:, k] for k in range(span.shape[1])] if span.size else []
    current = np.array(cols, dtype=np.int64).T if cols else np.zeros((dim, 0), dtype=np.int64)
    base_rank = rank(current, p) if current.size else 0
    extra = []
    for e in range(dim):
        unit = np.zeros((dim, 1), dtype=np.int64)
        unit[e, 0] = 1
        trial = np.hstack([current, unit]) if current.size else unit
        if rank(trial, p) > base_rank:
            current, base_rank = trial, base_rank + 1
            extra.append(unit[:, 0])
    return np.array(extra, dtype=np.int64).T if extra else np.zeros((dim, 0), dtype=np.int64)
