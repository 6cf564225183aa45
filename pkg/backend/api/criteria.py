"""
Handlers for the single-criterion subcommands: zigzag, dsg, evade and oracle.

Each handler takes a loaded input, runs one criterion and returns the
documents the CLI prints. Module errors are logged here and re-raised for
main.py to turn into exit codes.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

from complexes.stream import SimplicialEventStream
from core.errors import EmptyFenceError, EvasionError
from core.model import Scenario
from db.schema import CriterionVerdict
from evasion.reeb import ReebGraph, decide_evasion
from homology.dsg import DsgResult, dsg_criterion
from homology.field import check_prime
from homology.stacked import build_stacked_complex
from oracle.spacetime import OracleResult, evasion_oracle, refine_until_stable
from utils.performance_monitor import PerformanceMonitor
from zigzag.module import Barcode
from zigzag.streaming import (EVASION_POSSIBLE, NO_EVASION_CERTIFIED, StreamingStats, full_length_criterion,
                              stream_barcode)

from api.pipeline import build_stream, require_scenario

logger = logging.getLogger(__name__)

Source = Union[Scenario, SimplicialEventStream]

# Verdict recorded when the Vietoris–Rips stream keeps a full-length bar.
VR_INCONCLUSIVE = "inconclusive"


@dataclass
class ZigzagOutcome:
    verdict: CriterionVerdict
    barcode: Barcode
    n: int


def run_zigzag(source: Source, degree: int = 1, p: int = 2, tol: Optional[float] = None, kind: str = "cech",
               monitor: Optional[PerformanceMonitor] = None) -> ZigzagOutcome:
    """
    Streaming zigzag barcode of H_degree and the full-length-bar verdict.

    On the Čech stream a full-length bar is necessary for evasion. On the
    Vietoris–Rips stream only its absence is conclusive.
    """
    check_prime(p)
    monitor = monitor or PerformanceMonitor()
    es = build_stream(source, kind, tol, monitor)
    stats = StreamingStats()
    with monitor.stage(f"zigzag.{kind}.H{degree}"):
        try:
            barcode = stream_barcode(es, degree, p, stats)
        except EvasionError as e:
            logger.error(f"zigzag over the {kind} stream failed: {e}")
            raise
    verdict = full_length_criterion(barcode, es.n)
    if kind == "vr" and verdict == EVASION_POSSIBLE:
        verdict = VR_INCONCLUSIVE
    name = "zigzag" if kind == "cech" else f"zigzag_{kind}"
    detail = {
        "events": float(es.n),
        "intervals": float(len(barcode.intervals)),
        "full_length_bars": float(len(barcode.full_length())),
        "peak_tracked": float(stats.peak_tracked),
        "max_slice": float(stats.max_slice),
    }
    logger.info(f"{name} H_{degree} over F_{p}: {verdict}")
    return ZigzagOutcome(CriterionVerdict(criterion=name, verdict=verdict, necessary_only=True, detail=detail),
                         barcode, es.n)


def run_dsg(source: Source, p: int = 2, tol: Optional[float] = None, degree: int = 2,
            monitor: Optional[PerformanceMonitor] = None) -> Tuple[CriterionVerdict, DsgResult]:
    """Relative-homology certificate on the stacked Čech complex; only no_evasion_certified is conclusive."""
    check_prime(p)
    monitor = monitor or PerformanceMonitor()
    es = build_stream(source, "cech", tol, monitor)
    with monitor.stage("dsg"):
        try:
            result = dsg_criterion(build_stacked_complex(es), degree, p)
        except EvasionError as e:
            logger.error(f"dsg criterion failed: {e}")
            raise
    detail = {
        "connecting_rank": float(result.connecting_rank),
        "relative_dim": float(result.relative_dim),
        "fence_dim": float(result.fence_dim),
        "kernel_rank": float(result.kernel_rank),
    }
    return CriterionVerdict(criterion="dsg", verdict=result.verdict, necessary_only=True, detail=detail), result


def run_evade(source: Source, tol: Optional[float] = None,
              monitor: Optional[PerformanceMonitor] = None) -> Tuple[CriterionVerdict, ReebGraph]:
    """Exact decision by label propagation over the alpha stream with rotations."""
    monitor = monitor or PerformanceMonitor()
    es = build_stream(source, "alpha", tol, monitor)
    if not es.fence:
        raise EmptyFenceError("label propagation needs fence sensors to fix the outer cycle")
    with monitor.stage("evade"):
        try:
            verdict, reeb = decide_evasion(es)
        except EvasionError as e:
            logger.error(f"label propagation refused: {e}")
            raise
    detail = {
        "events": float(es.n),
        "reeb_nodes": float(reeb.graph.number_of_nodes()),
        "true_components_at_end": float(sum(1 for _, a in reeb.graph.nodes(data=True)
                                           if a["label"] and a["t_end"] == es.grid.slot_times()[-1])),
    }
    return CriterionVerdict(criterion="rotation", verdict=verdict, necessary_only=False, detail=detail), reeb


def run_oracle(source: Source, h: Optional[float] = None, dt: Optional[float] = None, refine: bool = False,
               workers: Optional[int] = None,
               monitor: Optional[PerformanceMonitor] = None) -> Tuple[CriterionVerdict, OracleResult]:
    """Spacetime-grid ground truth; `refine` halves the grid until the verdict settles."""
    scenario = require_scenario(source, "the oracle")
    monitor = monitor or PerformanceMonitor()
    with monitor.stage("oracle"):
        result = refine_until_stable(scenario, h, dt) if refine else evasion_oracle(scenario, h, dt, workers)
    detail = {"h": result.h, "dt": result.dt, "slices": float(len(result.times))}
    if result.stable is not None:
        detail["stable"] = 1.0 if result.stable else 0.0
    return CriterionVerdict(criterion="oracle", verdict=result.verdict, necessary_only=False, detail=detail), result


__all__ = ["run_zigzag", "run_dsg", "run_evade", "run_oracle", "ZigzagOutcome",
           "EVASION_POSSIBLE", "NO_EVASION_CERTIFIED", "VR_INCONCLUSIVE"]
