"""
Zigzag modules of event streams, the one-pass streaming barcode, the
cohomology module and the full-length-interval criterion.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from complexes.simplicial import SimplicialComplex, dimension_key, faces
from complexes.stream import ADD, REMOVE, EventBatch, SimplicialEventStream, apply_batch
from core.model import TimeGrid
from homology.chains import CellComplex
from homology.cohomology import cohomology, restriction_map
from homology.linalg import complement_basis, nullspace, solve
from homology.reduction import homology, induced_map
from zigzag.decompose import decompose
from zigzag.module import LEFT, RIGHT, Arrow, Barcode, ZigzagModule

logger = logging.getLogger(__name__)

EVASION_POSSIBLE = "evasion_possible"
NO_EVASION_CERTIFIED = "no_evasion_certified"


def _spaces(es: SimplicialEventStream) -> List[SimplicialComplex]:
    """C(s_0), U_0, C(s_1), ..., U_{n-1}, C(s_n)."""
    cs, us = es.slices(), es.unions()
    out = [cs[0]]
    for u, c in zip(us, cs[1:]):
        out += [u, c]
    return out


def zigzag_from_stream(es: SimplicialEventStream, j: int, p: int = 2) -> ZigzagModule:
    """H_j(C(s_0)) -> H_j(U_0) <- H_j(C(s_1)) -> ... over 2n + 1 slots."""
    spaces = _spaces(es)
    cells = [CellComplex.from_simplicial(cx) for cx in spaces]
    bases = [homology(c, j, p) for c in cells]
    arrows = []
    for k in range(len(spaces) - 1):
        if k % 2 == 0:  # C(s_i) -> U_i
            mat = induced_map(cells[k], cells[k + 1], j, p, source_basis=bases[k], target_basis=bases[k + 1])
            arrows.append(Arrow(RIGHT, mat))
        else:  # U_i <- C(s_{i+1})
            mat = induced_map(cells[k + 1], cells[k], j, p, source_basis=bases[k + 1], target_basis=bases[k])
            arrows.append(Arrow(LEFT, mat))
    return ZigzagModule([b.betti for b in bases], arrows, p, es.grid.slot_times())


def cohomology_zigzag(es: SimplicialEventStream, j: int, p: int = 2) -> Barcode:
    """Barcode of H^j(C(s_0)) <- H^j(U_0) -> H^j(C(s_1)) <- ... (restriction maps)."""
    spaces = _spaces(es)
    bases = [cohomology(cx, j, p) for cx in spaces]
    arrows = []
    for k in range(len(spaces) - 1):
        if k % 2 == 0:  # C(s_i) <- U_i
            mat = restriction_map(spaces[k + 1], spaces[k], j, p, big_basis=bases[k + 1], small_basis=bases[k])
            arrows.append(Arrow(LEFT, mat))
        else:  # U_i -> C(s_{i+1})
            mat = restriction_map(spaces[k], spaces[k + 1], j, p, big_basis=bases[k], small_basis=bases[k + 1])
            arrows.append(Arrow(RIGHT, mat))
    module = ZigzagModule([b.betti for b in bases], arrows, p, es.grid.slot_times())
    barcode = decompose(module)
    barcode.degree = j
    return barcode


@dataclass
class StreamingStats:
    """Instrumentation for stream_barcode: simplices held at once, versus slice sizes."""
    peak_tracked: int = 0
    max_slice: int = 0
    steps: int = 0
    emitted: List = field(default_factory=list)


@dataclass
class _Bar:
    birth: int  # fine slot
    vector: np.ndarray  # coordinates in the current homology basis
    coarse_birth: Optional[int] = None


class StreamingState:
    """
    Open intervals of the per-simplex zigzag, with a basis of the current
    homology whose vectors carry their birth slots. Bars are kept oldest
    first; an older vector may always be added to a younger one.
    """

    def __init__(self, initial: SimplicialComplex, j: int, p: int, stats: Optional[StreamingStats] = None):
        self.j, self.p = j, p
        self.stats = stats or StreamingStats()
        self.complex = initial
        self.cells = CellComplex.from_simplicial(initial)
        self.basis = homology(self.cells, j, p)
        self.slot = 0
        self.bars: List[_Bar] = [_Bar(0, e) for e in np.eye(self.basis.betti, dtype=np.int64)]
        self.last_label = 0
        self.closed: List = []
        self.stats.max_slice = max(self.stats.max_slice, len(initial))
        self.label(1)

    def label(self, coarse: int):
        """Mark the current fine slot as the given zigzag slot."""
        self.last_label = coarse
        for bar in self.bars:
            if bar.coarse_birth is None:
                bar.coarse_birth = coarse

    def _close(self, bar: _Bar):
        if bar.coarse_birth is not None:
            interval = (bar.coarse_birth, self.last_label)
            self.closed.append(interval)
            self.stats.emitted.append(interval)

    def _advance(self, new_complex: SimplicialComplex):
        cells = CellComplex.from_simplicial(new_complex)
        basis = homology(cells, self.j, self.p)
        self.stats.peak_tracked = max(self.stats.peak_tracked, len(self.complex) + len(new_complex))
        self.stats.steps += 1
        return cells, basis

    def forward(self, new_complex: SimplicialComplex):
        """Current complex includes into new_complex."""
        p = self.p
        cells, basis = self._advance(new_complex)
        f = induced_map(self.cells, cells, self.j, p, source_basis=self.basis, target_basis=basis)
        pivots = {}
        survivors = []
        for bar in self.bars:
            image = (f @ bar.vector) % p if f.size else np.zeros(basis.betti, dtype=np.int64)
            r = image.copy()
            while r.any():
                piv = int(np.flatnonzero(r)[-1])
                if piv not in pivots:
                    break
                other = pivots[piv]
                r = (r - r[piv] * pow(int(other[piv]), p - 2, p) * other) % p
            if r.any():
                pivots[int(np.flatnonzero(r)[-1])] = r
                survivors.append(_Bar(bar.birth, image, bar.coarse_birth))
            else:
                self._close(bar)
        self.slot += 1
        span = np.array([b.vector for b in survivors], dtype=np.int64).T if survivors \
            else np.zeros((basis.betti, 0), dtype=np.int64)
        fresh = complement_basis(span, basis.betti, p)
        self.bars = survivors + [_Bar(self.slot, fresh[:, k]) for k in range(fresh.shape[1])]
        self.complex, self.cells, self.basis = new_complex, cells, basis

    def backward(self, new_complex: SimplicialComplex):
        """new_complex includes into the current complex."""
        p = self.p
        cells, basis = self._advance(new_complex)
        g = induced_map(cells, self.cells, self.j, p, source_basis=basis, target_basis=self.basis)
        old_betti = self.basis.betti
        bars_matrix = np.array([b.vector for b in self.bars], dtype=np.int64).T if self.bars \
            else np.zeros((old_betti, 0), dtype=np.int64)
        # Image vectors in bar coordinates, paired with their preimages.
        pairs = []
        for k in range(basis.betti):
            col = g[:, k] if g.size else np.zeros(old_betti, dtype=np.int64)
            coords = solve(bars_matrix, col, p)
            y = np.zeros(basis.betti, dtype=np.int64)
            y[k] = 1
            pairs.append((coords, y))
        # Echelon form with respect to the youngest bar in each support.
        pivots = {}
        for coords, y in pairs:
            while coords.any():
                piv = int(np.flatnonzero(coords)[-1])
                if piv not in pivots:
                    pivots[piv] = (coords, y)
                    break
                oc, oy = pivots[piv]
                factor = (coords[piv] * pow(int(oc[piv]), p - 2, p)) % p
                coords = (coords - factor * oc) % p
                y = (y - factor * oy) % p
        survivors = []
        for idx, bar in enumerate(self.bars):
            if idx in pivots:
                coords, y = pivots[idx]
                scale = pow(int(coords[idx]), p - 2, p)
                survivors.append(_Bar(bar.birth, (scale * y) % p, bar.coarse_birth))
            else:
                self._close(bar)
        self.slot += 1
        g_kernel = nullspace(g, p)
        born = [_Bar(self.slot, g_kernel[:, k]) for k in range(g_kernel.shape[1])]
        self.bars = born + survivors
        self.complex, self.cells, self.basis = new_complex, cells, basis

    def finish(self) -> List:
        for bar in self.bars:
            self._close(bar)
        self.bars = []
        return self.closed


def stream_barcode(es: SimplicialEventStream, j: int, p: int = 2,
                   stats: Optional[StreamingStats] = None) -> Barcode:
    """
    One pass over the stream, one simplex at a time: additions in order of
    increasing dimension, removals in decreasing dimension. Only the current
    complex and its successor are held.
    """
    stats = stats if stats is not None else StreamingStats()
    state = StreamingState(es.initial, j, p, stats)
    current = es.initial
    for i, batch in enumerate(es.events):
        apply_batch(current, batch)  # validates the batch against the current complex
        adds = sorted(batch.added_set, key=dimension_key)
        removes = sorted(batch.removed_set, key=dimension_key, reverse=True)
        if not adds:
            state.forward(current)
        for s in adds:
            current = SimplicialComplex(current.simplices | {s})
            state.forward(current)
        state.label(2 * i + 2)
        if not removes:
            state.backward(current)
        for s in removes:
            current = SimplicialComplex(current.simplices - {s})
            state.backward(current)
        state.label(2 * i + 3)
        stats.max_slice = max(stats.max_slice, len(current))
    intervals = state.finish()
    logger.info(f"streamed H_{j} over {es.n} events: {len(intervals)} intervals, "
                f"peak {stats.peak_tracked} simplices held (largest slice {stats.max_slice})")
    return Barcode(2 * es.n + 1, intervals, p, degree=j, slot_times=es.grid.slot_times())


def full_length_criterion(b: Barcode, n: int) -> str:
    """no_evasion_certified iff no interval equals [1, 2n + 1]."""
    full = (1, 2 * n + 1)
    return EVASION_POSSIBLE if full in b.intervals else NO_EVASION_CERTIFIED


def batch_barcode(es: SimplicialEventStream, j: int, p: int = 2) -> Barcode:
    barcode = decompose(zigzag_from_stream(es, j, p))
    barcode.degree = j
    return barcode


def random_stream(rng: np.random.Generator, n_vertices: int = 5, n_events: int = 6,
                  max_dim: int = 2) -> SimplicialEventStream:
    """
    A random pure stream on vertices v0..v{n-1}: each batch adds one simplex
    whose faces are present or removes one maximal simplex.
    """
    vertices = [f"v{k}" for k in range(n_vertices)]
    current = SimplicialComplex.from_simplices([(v,) for v in vertices])
    initial = current
    events = []
    times = [(k + 1) / (n_events + 1) for k in range(n_events)]
    for t in times:
        addable = []
        for s in current.simplices:
            if len(s) > max_dim:
                continue
            for v in vertices:
                if v in s:
                    continue
                cand = tuple(sorted(s + (v,)))
                if cand not in current.simplices and all(f in current.simplices for f in faces(cand)):
                    addable.append(cand)
        maximal = [s for s in current.simplices
                   if len(s) > 1 and not any(len(o) == len(s) + 1 and set(s) < set(o) for o in current.simplices)]
        if maximal and (not addable or rng.random() < 0.4):
            pick = sorted(maximal)[int(rng.integers(len(maximal)))]
            batch = EventBatch(t, REMOVE, (pick,))
        else:
            pick = sorted(set(addable))[int(rng.integers(len(set(addable))))]
            batch = EventBatch(t, ADD, (pick,))
        current = apply_batch(current, batch)
        events.append(batch)
    return SimplicialEventStream(TimeGrid.from_event_times(times), initial, tuple(events))
