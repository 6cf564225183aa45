"""
Handlers for `report` and `render`: run every applicable criterion on one
scenario, or draw barcodes and complex snapshots as SVG.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

from complexes.stream import SimplicialEventStream
from core.errors import ConnectivityViolation, EmptyFenceError, EvasionError, UsageError
from core.model import Scenario
from db.schema import AnalysisReport, BarcodeDocument, CriterionVerdict
from evaluator.metrics import IMPLICATIONS, implication_violations
from utils.performance_monitor import PerformanceMonitor
from utils.svg_render import render_barcode, render_complex

from api.criteria import Source, run_dsg, run_evade, run_oracle, run_zigzag
from api.pipeline import barcode_document, build_stream, check_assumptions, scenario_digest

logger = logging.getLogger(__name__)


@dataclass
class ReportOptions:
    p: int = 2
    degree: int = 1
    tol: Optional[float] = None
    h: Optional[float] = None
    dt: Optional[float] = None
    oracle: bool = True
    timings: bool = True


def _error_verdict(criterion: str, error: EvasionError) -> CriterionVerdict:
    return CriterionVerdict(criterion=criterion, verdict=f"error:{type(error).__name__}", necessary_only=False,
                            detail={"exit_code": float(error.exit_code)})


def analyze(scenario: Scenario, options: Optional[ReportOptions] = None) -> AnalysisReport:
    """
    Every criterion that applies to the scenario, side by side.

    Criteria that refuse the scenario (no fence, disconnected coverage) are
    recorded as error verdicts; verdicts are never reconciled, only checked
    against the implication table.
    """
    options = options or ReportOptions()
    monitor = PerformanceMonitor()
    check_assumptions(scenario)
    verdicts: List[CriterionVerdict] = []
    barcodes: Dict[str, BarcodeDocument] = {}

    cech = build_stream(scenario, "cech", options.tol, monitor)
    for degree in sorted({0, options.degree}):
        outcome = run_zigzag(cech, degree, options.p, monitor=monitor)
        barcodes[f"H{degree}"] = barcode_document(outcome.barcode, outcome.n)
        if degree == options.degree:
            verdicts.append(outcome.verdict)

    for criterion, run in (("dsg", lambda: run_dsg(cech, options.p, monitor=monitor)),
                           ("rotation", lambda: run_evade(scenario, options.tol, monitor=monitor))):
        try:
            verdicts.append(run()[0])
        except (EmptyFenceError, ConnectivityViolation) as e:
            logger.warning(f"{scenario.name}: {criterion} does not apply: {e}")
            verdicts.append(_error_verdict(criterion, e))

    if options.oracle:
        verdicts.append(run_oracle(scenario, options.h, options.dt, monitor=monitor)[0])

    table = {v.criterion: v.verdict for v in verdicts}
    disagreements = []
    if scenario.fence_ids:
        disagreements = [f"{msg} [{IMPLICATIONS.get(msg.split()[0], 'exact')}]"
                         for msg in implication_violations(table)]
    for msg in disagreements:
        logger.warning(f"{scenario.name}: {msg}")

    parameters = {"field": float(options.p), "degree": float(options.degree)}
    if options.tol is not None:
        parameters["tol"] = options.tol
    oracle_detail = next((v.detail for v in verdicts if v.criterion == "oracle"), {})
    parameters.update({f"grid_{k}": oracle_detail[k] for k in ("h", "dt") if k in oracle_detail})

    if options.timings:
        monitor.log_summary()
    return AnalysisReport(
        scenario=scenario.name or "<unnamed>",
        digest=scenario_digest(scenario),
        verdicts=verdicts,
        barcodes=barcodes,
        disagreements=disagreements,
        parameters=parameters,
        timings={k: round(v, 6) for k, v in monitor.metrics.items()} if options.timings else None,
    )


def merge_reports(reports: List[AnalysisReport]) -> AnalysisReport:
    """
    Fold single-criterion reports of one scenario into one. A criterion seen
    twice keeps its last verdict; reports of different scenarios are refused.
    """
    if not reports:
        raise ValueError("nothing to merge")
    digests = {r.digest for r in reports}
    if len(digests) > 1:
        raise EvasionError(f"reports describe {len(digests)} different scenarios")
    verdicts: Dict[str, CriterionVerdict] = {}
    barcodes: Dict[str, BarcodeDocument] = {}
    parameters: Dict[str, float] = {}
    timings: Optional[Dict[str, float]] = None
    for r in reports:
        verdicts.update({v.criterion: v for v in r.verdicts})
        barcodes.update(r.barcodes)
        parameters.update(r.parameters)
        if r.timings is not None:
            timings = {**(timings or {}), **r.timings}
    merged = sorted(verdicts.values(), key=lambda v: v.criterion)
    table = {v.criterion: v.verdict for v in merged}
    disagreements = [f"{msg} [{IMPLICATIONS.get(msg.split()[0], 'exact')}]" for msg in implication_violations(table)]
    return AnalysisReport(scenario=reports[0].scenario, digest=reports[0].digest, verdicts=merged,
                          barcodes=barcodes, disagreements=disagreements, parameters=parameters, timings=timings)


def render_barcode_svg(source: Source, degree: int = 1, p: int = 2, tol: Optional[float] = None,
                       kind: str = "cech") -> str:
    outcome = run_zigzag(source, degree, p, tol, kind=kind)
    name = source.name if isinstance(source, Scenario) else f"{kind} stream"
    return render_barcode(outcome.barcode, title=f"{name}: H_{degree} zigzag barcode over F_{p}")


def render_slice_svg(source: Source, k: int, kind: str = "cech", tol: Optional[float] = None) -> str:
    """
    Snapshot of the complex in block k (between events k and k + 1). Sensor
    positions are drawn at the block's sample time, so a scenario is needed.
    """
    if not isinstance(source, Scenario):
        raise EvasionError("complex snapshots need the scenario for sensor positions")
    es: SimplicialEventStream = build_stream(source, kind, tol)
    slices = es.slices()
    if not 0 <= k < len(slices):
        raise UsageError(f"block {k} outside 0..{len(slices) - 1}")
    t = es.grid.sample_times[k]
    coords = dict(zip(source.ids, source.positions_at(t)))
    return render_complex(slices[k], coords, r=source.sensor_radius, fence=source.fence_ids,
                          title=f"{source.name}: {kind} complex at t={t:.4f} (block {k})")
