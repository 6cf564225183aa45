"""
Fixture-suite evaluation: every criterion on every scenario in a directory,
checked against the implication table.
"""
import glob
import logging
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Dict, List, Optional

from api.criteria import run_dsg, run_evade, run_oracle, run_zigzag
from api.pipeline import build_stream
from core.errors import EvasionError
from core.model import load_scenario
from db.schema import SuiteReport, SuiteRow
from dependencies import get_settings
from evaluator.metrics import IMPLICATIONS, implication_violations, violation_rate
from utils.fixture_builder import write_fixtures

logger = logging.getLogger(__name__)


def fixture_paths(fixtures_dir: Optional[str] = None) -> List[str]:
    """Scenario files of the fixture directory, generating the fixtures when it is empty."""
    fixtures_dir = fixtures_dir or get_settings().fixtures_dir
    paths = sorted(glob.glob(os.path.join(fixtures_dir, "*.json")))
    if not paths:
        logger.info(f"no fixtures in {fixtures_dir}; generating them")
        paths = sorted(write_fixtures(fixtures_dir))
    return paths


def evaluate_scenario(path: str, p: int = 2, degree: int = 1, h: Optional[float] = None,
                      tol: Optional[float] = None) -> SuiteRow:
    """One row of the table. Errors become verdicts so one bad scenario does not end the run."""
    with open(path) as f:
        scenario = load_scenario(f.read())
    name = scenario.name or os.path.splitext(os.path.basename(path))[0]
    verdicts: Dict[str, str] = {}
    try:
        cech = build_stream(scenario, "cech", tol)
    except EvasionError as e:
        logger.error(f"{name}: no Čech stream: {e}")
        cech = None
        verdicts["zigzag"] = verdicts["dsg"] = f"error:{type(e).__name__}"
    steps = [("oracle", lambda: run_oracle(scenario, h)[0])]
    if cech is not None:
        steps += [("zigzag", lambda: run_zigzag(cech, degree, p).verdict),
                  ("dsg", lambda: run_dsg(cech, p)[0])]
    steps.append(("rotation", lambda: run_evade(scenario, tol)[0]))
    for criterion, step in steps:
        try:
            verdicts[criterion] = step().verdict
        except EvasionError as e:
            logger.warning(f"{name}: {criterion} -> {type(e).__name__}: {e}")
            verdicts[criterion] = f"error:{type(e).__name__}"
    # the criteria presuppose a fence covering the boundary
    violations = implication_violations(verdicts) if scenario.fence_ids else []
    row = SuiteRow(scenario=name, verdicts=dict(sorted(verdicts.items())), violations=violations)
    logger.info(f"{name}: {row.verdicts}")
    return row


def evaluate_suite(fixtures_dir: Optional[str] = None, p: int = 2, degree: int = 1, h: Optional[float] = None,
                   tol: Optional[float] = None, max_workers: Optional[int] = None) -> SuiteReport:
    """
    Fan the fixtures out over worker processes; each scenario's pipeline is
    sequential. Rows come back in file-name order whatever the completion order.
    """
    paths = fixture_paths(fixtures_dir)
    max_workers = max_workers or get_settings().max_workers
    rows: Dict[str, SuiteRow] = {}
    if max_workers <= 1:
        for path in paths:
            rows[path] = evaluate_scenario(path, p, degree, h, tol)
    else:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            futures = {pool.submit(evaluate_scenario, path, p, degree, h, tol): path for path in paths}
            for future in as_completed(futures):
                rows[futures[future]] = future.result()
    ordered = [rows[path] for path in paths]
    count = sum(len(r.violations) for r in ordered)
    rate = violation_rate([r.violations for r in ordered])
    if count:
        logger.warning(f"{count} implication violation(s); {rate:.0%} of scenarios affected")
    else:
        logger.info(f"suite of {len(ordered)} scenarios: no implication violations")
    return SuiteReport(rows=ordered, implications=dict(IMPLICATIONS), violation_count=count)
