"""
Time-varying complexes in combinatorial form: an initial complex plus one
batch of simplex changes per event time.
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from pydantic import ValidationError

from complexes.alpha import RotationSnapshot
from complexes.simplicial import Simplex, SimplicialComplex, dimension_key, faces, make_simplex
from core.errors import EventMismatchError, ScenarioFormatError
from core.model import TimeGrid
from db.schema import EventDocument, EventStreamDocument, TimeGridDocument

logger = logging.getLogger(__name__)

ADD = "add"
REMOVE = "remove"
FLIP = "flip"

# Alpha event kinds
EDGE = "edge"
TRIANGLE = "triangle"
FREE_PAIR = "free_pair"


@dataclass(frozen=True)
class EventBatch:
    t: float
    op: str
    simplices: Tuple[Simplex, ...]
    added: Tuple[Simplex, ...] = ()  # flips only: the incoming diagonal and triangles
    kind: Optional[str] = None
    rotations: Optional[Dict[str, Tuple[str, ...]]] = None

    @property
    def removed_set(self) -> frozenset:
        return frozenset(self.simplices) if self.op in (REMOVE, FLIP) else frozenset()

    @property
    def added_set(self) -> frozenset:
        if self.op == ADD:
            return frozenset(self.simplices)
        return frozenset(self.added)

    @property
    def is_pure(self) -> bool:
        return self.op in (ADD, REMOVE)


def apply_batch(cx: SimplicialComplex, batch: EventBatch) -> SimplicialComplex:
    """Apply one batch, checking it against the current complex and face closure."""
    missing = [s for s in batch.removed_set if s not in cx.simplices]
    if missing:
        raise EventMismatchError(f"t={batch.t}: removing absent simplices {sorted(missing)[:3]}")
    present = [s for s in batch.added_set if s in cx.simplices]
    if present:
        raise EventMismatchError(f"t={batch.t}: adding present simplices {sorted(present)[:3]}")
    out = (cx.simplices - batch.removed_set) | batch.added_set
    for s in out:
        for f in faces(s):
            if f not in out:
                raise EventMismatchError(f"t={batch.t}: face {f} of {s} missing after batch")
    return SimplicialComplex(frozenset(out))


@dataclass(frozen=True)
class SimplicialEventStream:
    grid: TimeGrid
    initial: SimplicialComplex
    events: Tuple[EventBatch, ...]
    complex_kind: str = "cech"
    initial_rotations: Optional[RotationSnapshot] = None
    fence: Tuple[str, ...] = ()
    outer: Optional[Tuple[Tuple[str, str], ...]] = None
    _slices: List[SimplicialComplex] = field(default_factory=list, compare=False, repr=False)

    def __post_init__(self):
        if len(self.events) != self.grid.n:
            raise EventMismatchError(f"{len(self.events)} batches for {self.grid.n} event times")
        for batch, t in zip(self.events, self.grid.event_times):
            if batch.t != t:
                raise EventMismatchError(f"batch time {batch.t} does not match grid time {t}")
            if batch.op not in (ADD, REMOVE, FLIP):
                raise EventMismatchError(f"unknown op {batch.op}")

    @property
    def n(self) -> int:
        return len(self.events)

    def slices(self) -> List[SimplicialComplex]:
        """C(s_0), ..., C(s_n), replayed once and memoized."""
        if not self._slices:
            current = self.initial
            out = [current]
            for batch in self.events:
                current = apply_batch(current, batch)
                out.append(current)
            self._slices.extend(out)
        return list(self._slices)

    def unions(self) -> List[SimplicialComplex]:
        """U_i = C(s_i) ∪ C(s_{i+1}); the larger slice for pure batches."""
        cs = self.slices()
        return [a.union(b) for a, b in zip(cs, cs[1:])]

    def max_slice_size(self) -> int:
        return max(len(c) for c in self.slices())

    def require_pure(self):
        for batch in self.events:
            if not batch.is_pure:
                raise EventMismatchError(f"t={batch.t}: batch mixes additions and removals")

    def signature(self) -> List[Tuple[str, Tuple[Simplex, ...], Tuple[Simplex, ...]]]:
        """Time-free combinatorial content, for comparing two streams."""
        return [(b.op, tuple(sorted(b.simplices)), tuple(sorted(b.added))) for b in self.events]


def _simplex_list(simplices) -> List[List[str]]:
    return [list(s) for s in sorted(simplices, key=dimension_key)]


def stream_to_document(es: SimplicialEventStream) -> EventStreamDocument:
    events = []
    for b in es.events:
        events.append(EventDocument(
            t=b.t,
            op=b.op,
            simplices=_simplex_list(b.simplices),
            added=_simplex_list(b.added) if b.added else None,
            kind=b.kind,
            rotations={v: list(o) for v, o in sorted(b.rotations.items())} if b.rotations is not None else None,
        ))
    return EventStreamDocument(
        complex=es.complex_kind,
        grid=TimeGridDocument(event_times=list(es.grid.event_times), sample_times=list(es.grid.sample_times)),
        initial=_simplex_list(es.initial.simplices),
        initial_rotations=es.initial_rotations.to_document() if es.initial_rotations else None,
        fence=list(es.fence),
        outer=[list(e) for e in es.outer] if es.outer else None,
        events=events,
    )


def dump_stream(es: SimplicialEventStream) -> str:
    return json.dumps(stream_to_document(es).model_dump(exclude_none=True), indent=2)


def stream_from_document(doc: EventStreamDocument) -> SimplicialEventStream:
    try:
        grid = TimeGrid(tuple(doc.grid.event_times), tuple(doc.grid.sample_times))
    except ValueError as e:
        raise ScenarioFormatError(f"invalid time grid: {e}") from e
    events = tuple(
        EventBatch(
            t=e.t,
            op=e.op,
            simplices=tuple(make_simplex(s) for s in e.simplices),
            added=tuple(make_simplex(s) for s in (e.added or [])),
            kind=e.kind,
            rotations={v: tuple(o) for v, o in e.rotations.items()} if e.rotations is not None else None,
        )
        for e in doc.events
    )
    es = SimplicialEventStream(
        grid=grid,
        initial=SimplicialComplex.from_simplices(doc.initial, t=0.0, close=False),
        events=events,
        complex_kind=doc.complex,
        initial_rotations=RotationSnapshot.from_document(doc.initial_rotations) if doc.initial_rotations else None,
        fence=tuple(doc.fence),
        outer=tuple((a, b) for a, b in doc.outer) if doc.outer else None,
    )
    es.slices()
    return es


def load_stream(text: str) -> SimplicialEventStream:
    """Parse an event stream document and replay it once to validate every batch."""
    try:
        doc = EventStreamDocument.model_validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]
        loc = ".".join(str(p) for p in first["loc"])
        raise ScenarioFormatError(f"invalid event stream at {loc or '<root>'}: {first['msg']}") from e
    es = stream_from_document(doc)
    logger.info(f"Loaded {doc.complex} event stream with {es.n} events")
    return es
