"""
Command-line entry point.

    python main.py <subcommand> [options] <input>

Reports go to stdout (or --output); logs go to stderr.
"""
import argparse
import logging
import sys
from typing import List, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from api.criteria import run_dsg, run_evade, run_oracle, run_zigzag
from api.pipeline import (barcode_document, build_stream, check_assumptions, dump_document, read_input,
                          require_scenario, scenario_digest, static_coverage_hole_count)
from api.report import ReportOptions, analyze, merge_reports, render_barcode_svg, render_slice_svg
from complexes.stream import dump_stream
from core.errors import EXIT_CODES, EvasionError, ScenarioFormatError, UsageError
from core.model import Scenario
from db.schema import AnalysisReport
from dependencies import get_settings
from evaluator.suite import evaluate_suite
from homology.field import is_prime
from utils.performance_monitor import PerformanceMonitor
from utils.svg_render import render_barcode

# Load environment variables
load_dotenv()

logger = logging.getLogger("evasion")


def _exit_code_table() -> str:
    rows = sorted(EXIT_CODES.items(), key=lambda kv: kv[1])
    lines = [f"  {code:>3}  {name}" for name, code in rows]
    return "exit codes:\n    0  success\n" + "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", type=int, default=settings.field, help="prime coefficient field (default %(default)s)")
    common.add_argument("--degree", type=int, default=1, help="homology degree for the zigzag criterion")
    common.add_argument("--tol", type=float, default=settings.event_tol, help="event time resolution")
    common.add_argument("--grid-h", type=float, default=None, help="oracle cell size (default r * grid factor)")
    common.add_argument("--grid-dt", type=float, default=None, help="oracle time step")
    common.add_argument("--no-timings", action="store_true", help="omit stage timings from reports")
    common.add_argument("--format", choices=("json", "svg", "dot"), default="json")
    common.add_argument("-o", "--output", default=None, help="write to a file instead of stdout")

    parser = argparse.ArgumentParser(
        prog="evasion",
        description="Evasion-path analysis for mobile sensor networks.",
        epilog=_exit_code_table(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="write the event stream of a scenario")
    p.add_argument("input")
    p.add_argument("--complex", choices=("cech", "vr", "alpha"), default="cech")

    p = sub.add_parser("zigzag", parents=[common], help="zigzag barcode and full-length-bar verdict")
    p.add_argument("input")
    p.add_argument("--complex", choices=("cech", "vr"), default="cech")

    p = sub.add_parser("dsg", parents=[common], help="relative homology certificate on the stacked complex")
    p.add_argument("input")

    p = sub.add_parser("evade", parents=[common], help="exact decision from alpha complexes and rotations")
    p.add_argument("input")

    p = sub.add_parser("oracle", parents=[common], help="spacetime-grid ground truth")
    p.add_argument("input")
    p.add_argument("--refine", action="store_true", help="halve the grid until the verdict is stable")

    p = sub.add_parser("report", parents=[common], help="all criteria with the implication table")
    p.add_argument("input", nargs="?")
    p.add_argument("--all-fixtures", action="store_true", help="run the fixture suite instead")
    p.add_argument("--merge", nargs="+", metavar="REPORT", help="merge reports written by other subcommands")
    p.add_argument("--no-oracle", action="store_true")
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("render", parents=[common], help="SVG barcode or complex snapshot")
    p.add_argument("input")
    p.add_argument("--complex", choices=("cech", "vr", "alpha"), default="cech")
    p.add_argument("--slice", type=int, default=None, help="draw the complex of this block instead")
    return parser


def _check_arguments(args) -> None:
    if not is_prime(args.field):
        raise UsageError(f"--field needs a prime, got {args.field}")
    if args.degree < 0:
        raise UsageError("--degree must be non-negative")
    for flag, value in (("--tol", args.tol), ("--grid-h", args.grid_h), ("--grid-dt", args.grid_dt)):
        if value is not None and value <= 0:
            raise UsageError(f"{flag} must be positive")
    if getattr(args, "workers", None) is not None and args.workers < 1:
        raise UsageError("--workers must be at least 1")
    if args.command == "render":
        if args.slice is not None and args.slice < 0:
            raise UsageError("--slice must be non-negative")
        if args.slice is None and args.complex == "alpha":
            # flips mix additions and removals, so alpha streams have no zigzag barcode
            raise UsageError("barcodes are drawn for cech or vr streams; use --slice to draw an alpha complex")


def _single_report(source, verdicts, barcodes=None, monitor: Optional[PerformanceMonitor] = None,
                   no_timings: bool = False, parameters=None) -> AnalysisReport:
    if isinstance(source, Scenario):
        name, digest = source.name or "<unnamed>", scenario_digest(source)
    else:
        name, digest = f"{source.complex_kind} stream", ""
    timings = None
    if monitor is not None and not no_timings:
        timings = {k: round(v, 6) for k, v in monitor.metrics.items()}
    return AnalysisReport(scenario=name, digest=digest, verdicts=verdicts, barcodes=barcodes or {},
                          parameters=parameters or {}, timings=timings)


def _dispatch(args) -> str:
    _check_arguments(args)
    params = {"field": float(args.field), "degree": float(args.degree), "tol": args.tol}
    monitor = PerformanceMonitor()

    if args.command == "report":
        if args.all_fixtures:
            return dump_document(evaluate_suite(get_settings().fixtures_dir, args.field, args.degree,
                                                args.grid_h, args.tol, args.workers))
        if args.merge:
            reports = []
            for path in args.merge:
                try:
                    with open(path) as f:
                        reports.append(AnalysisReport.model_validate_json(f.read()))
                except OSError as e:
                    raise ScenarioFormatError(f"cannot read {path}: {e.strerror}") from e
                except ValidationError as e:
                    raise ScenarioFormatError(f"{path} is not a report: {e.errors()[0]['msg']}") from e
            return dump_document(merge_reports(reports))
        if not args.input:
            raise ScenarioFormatError("report needs a scenario, --merge or --all-fixtures")
        scenario = require_scenario(read_input(args.input), "report")
        options = ReportOptions(p=args.field, degree=args.degree, tol=args.tol, h=args.grid_h, dt=args.grid_dt,
                                oracle=not args.no_oracle, timings=not args.no_timings)
        return dump_document(analyze(scenario, options))

    source = read_input(args.input)
    if isinstance(source, Scenario):
        check_assumptions(source)

    if args.command == "simulate":
        scenario = require_scenario(source, "simulate")
        static_coverage_hole_count(scenario, 0.0, args.field)
        return dump_stream(build_stream(scenario, args.complex, args.tol, monitor)) + "\n"

    if args.command == "zigzag":
        outcome = run_zigzag(source, args.degree, args.field, args.tol, kind=args.complex, monitor=monitor)
        if args.format == "svg":
            return render_barcode(outcome.barcode, title=f"{outcome.verdict.criterion} H_{args.degree} over F_{args.field}")
        return dump_document(_single_report(source, [outcome.verdict],
                                            {f"H{args.degree}": barcode_document(outcome.barcode, outcome.n)},
                                            monitor, args.no_timings, params))

    if args.command == "dsg":
        verdict, _ = run_dsg(source, args.field, args.tol, monitor=monitor)
        return dump_document(_single_report(source, [verdict], None, monitor, args.no_timings, params))

    if args.command == "evade":
        verdict, reeb = run_evade(source, args.tol, monitor=monitor)
        if args.format == "dot":
            return reeb.to_dot()
        return dump_document(reeb.to_document(verdict.verdict))

    if args.command == "oracle":
        verdict, result = run_oracle(source, args.grid_h, args.grid_dt, refine=args.refine, monitor=monitor)
        return dump_document(result.to_document())

    if args.command == "render":
        if args.slice is not None:
            return render_slice_svg(source, args.slice, args.complex, args.tol)
        return render_barcode_svg(source, args.degree, args.field, args.tol, kind=args.complex)
    raise ValueError(f"unknown command {args.command}")


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    settings = get_settings()
    logging.basicConfig(level=getattr(logging, settings.log_level.upper(), logging.INFO),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        text = _dispatch(args)
    except EvasionError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception:
        logger.exception("unexpected error")
        return EXIT_CODES["unexpected error"]
    if args.output:
        with open(args.output, "w") as f:
            f.write(text)
        logger.info(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(run())
