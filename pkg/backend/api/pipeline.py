"""
Shared pipeline steps for the CLI handlers: loading inputs, building event
streams and assembling report documents.
"""
import hashlib
import json
import logging
import os
from typing import Optional, Union

from pydantic import BaseModel, ValidationError

from complexes.events import detect_events
from complexes.nerve import cech_complex
from complexes.stream import SimplicialEventStream, load_stream
from core.errors import EvasionError, ScenarioFormatError
from core.model import Scenario, dump_scenario, load_scenario, validate_assumptions
from db.schema import BarcodeDocument
from dependencies import get_settings
from evasion.rotation import attach_outer
from homology.chains import CellComplex
from homology.reduction import betti_numbers
from utils.performance_monitor import PerformanceMonitor
from zigzag.module import Barcode

logger = logging.getLogger(__name__)


def read_input(path: str) -> Union[Scenario, SimplicialEventStream]:
    """A scenario file, or an event stream written by `simulate`."""
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        logger.error(f"cannot read {path}: {e}")
        raise ScenarioFormatError(f"cannot read {path}: {e.strerror}") from e
    try:
        keys = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioFormatError(f"{path} is not JSON: {e.msg} at line {e.lineno}") from e
    if isinstance(keys, dict) and "events" in keys:
        try:
            return load_stream(text)
        except ValidationError as e:
            first = e.errors()[0]
            loc = ".".join(str(p) for p in first["loc"])
            raise ScenarioFormatError(f"invalid event stream at {loc or '<root>'}: {first['msg']}") from e
    scenario = load_scenario(text)
    if scenario.name is None:
        scenario = Scenario(scenario.domain, scenario.sensors, scenario.sensor_radius,
                            os.path.splitext(os.path.basename(path))[0])
    return scenario


def require_scenario(source: Union[Scenario, SimplicialEventStream], what: str) -> Scenario:
    if not isinstance(source, Scenario):
        raise ScenarioFormatError(f"{what} needs a scenario file, not an event stream")
    return source


def scenario_digest(scenario: Scenario) -> str:
    return hashlib.sha256(dump_scenario(scenario).encode()).hexdigest()


def check_assumptions(scenario: Scenario):
    diagnostics = validate_assumptions(scenario)
    for warning in diagnostics.warnings:
        logger.warning(f"{scenario.name}: {warning}")
    return diagnostics


def build_stream(source: Union[Scenario, SimplicialEventStream], kind: str = "cech",
                 tol: Optional[float] = None, monitor: Optional[PerformanceMonitor] = None) -> SimplicialEventStream:
    """Event stream for a scenario; a stream input is passed through after a kind check."""
    if isinstance(source, SimplicialEventStream):
        if source.complex_kind != kind:
            raise ScenarioFormatError(f"input stream is {source.complex_kind}, {kind} needed")
        return source
    tol = tol if tol is not None else get_settings().event_tol
    monitor = monitor or PerformanceMonitor()
    with monitor.stage(f"events.{kind}"):
        try:
            es = detect_events(source, kind=kind, tol=tol)
        except EvasionError as e:
            logger.error(f"{source.name}: {kind} event detection failed: {e}")
            raise
    if kind == "alpha" and source.fence_ids:
        es = attach_outer(es, source)
    logger.info(f"{source.name}: {es.n} {kind} events")
    return es


def static_coverage_hole_count(scenario: Scenario, t: float = 0.0, p: int = 2) -> int:
    """
    Uncovered components of the domain at time t, read off the Čech complex.

    In the plane the first Betti number of the union of balls counts the
    bounded components of its complement; with the fence covering the domain
    boundary those are exactly the holes inside the domain.
    """
    points = dict(zip(scenario.ids, scenario.positions_at(t)))
    cx = cech_complex(points, scenario.sensor_radius, max_dim=2, t=t)
    betti = betti_numbers(CellComplex.from_simplicial(cx), p)
    holes = betti[1] if len(betti) > 1 else 0
    logger.info(f"{scenario.name}: {holes} coverage hole(s) at t={t}")
    return holes


def barcode_document(barcode: Barcode, n: int) -> BarcodeDocument:
    return BarcodeDocument(n=n, degree=barcode.degree if barcode.degree is not None else -1, field=barcode.p,
                           intervals=[[b, d] for b, d in barcode.intervals], slot_times=list(barcode.slot_times))


def dump_document(doc: BaseModel) -> str:
    """Canonical JSON: sorted keys, fixed indent, no None fields."""
    return json.dumps(doc.model_dump(exclude_none=True), indent=2, sort_keys=True) + "\n"
