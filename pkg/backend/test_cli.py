#!/usr/bin/env python3
"""
Tests for the command-line entry point, reports and the fixture suite
"""
import json

import pytest

from api.report import ReportOptions, analyze, merge_reports
from core.errors import EvasionError
from core.model import dump_scenario
from db.schema import AnalysisReport
from evaluator.metrics import IMPLICATIONS, implication_violations, violation_rate
from evaluator.suite import evaluate_suite
from main import run
from utils.fixture_builder import (CONNECTED, FIXTURES, cartoon_yes_no, stacked_cech, teleport_jump, teleport_orbit,
                                   write_fixtures)


@pytest.fixture
def scenario_file(tmp_path):
    def write(scenario, name=None):
        path = tmp_path / f"{name or scenario.name}.json"
        path.write_text(dump_scenario(scenario))
        return str(path)
    return write


def _run_json(capsys, argv):
    assert run(argv) == 0
    return json.loads(capsys.readouterr().out)


def test_help_lists_exit_codes(capsys):
    assert run(["--help"]) == 0
    out = capsys.readouterr().out
    assert "exit codes:" in out
    assert "ScenarioFormatError" in out and "EmptyFenceError" in out


def test_usage_errors(capsys, scenario_file, tmp_path):
    path = scenario_file(teleport_jump())
    assert run(["frobnicate", path]) == 2
    assert run(["zigzag", path, "--field", "4"]) == 2
    assert run(["zigzag", str(tmp_path / "missing.json")]) == 3
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert run(["dsg", str(broken)]) == 3


@pytest.mark.parametrize("argv", [
    ["render", "--complex", "alpha"],
    ["render", "--slice", "99"],
    ["zigzag", "--tol", "0"],
    ["oracle", "--grid-h", "-0.1"],
    ["zigzag", "--degree", "-1"],
])
def test_nonsense_arguments_are_usage_errors(scenario_file, argv):
    assert run(argv + [scenario_file(teleport_jump())]) == 2


def test_alpha_complexes_are_drawn_by_slice(scenario_file, tmp_path):
    svg = tmp_path / "alpha.svg"
    assert run(["render", scenario_file(cartoon_yes_no("down")), "--complex", "alpha", "--slice", "0",
                "-o", str(svg)]) == 0
    assert svg.read_text().lstrip().startswith("<?xml")


def test_internal_value_errors_are_not_usage_errors(monkeypatch, scenario_file):
    def broken(*args, **kwargs):
        raise ValueError("arrow 2: matrix shape (1, 2), expected (2, 1)")

    monkeypatch.setattr("main.run_dsg", broken)
    assert run(["dsg", scenario_file(teleport_jump())]) == 1


def test_merge_refuses_files_that_are_not_reports(scenario_file, tmp_path):
    missing = tmp_path / "missing.json"
    assert run(["report", "--merge", scenario_file(teleport_jump())]) == 3
    assert run(["report", "--merge", str(missing)]) == 3


def test_coincident_sensors_exit_with_their_code(scenario_file):
    doc = json.loads(dump_scenario(stacked_cech()))
    doc["sensors"][1]["waypoints"] = doc["sensors"][0]["waypoints"]
    path = scenario_file(stacked_cech(), "clash")
    with open(path, "w") as f:
        json.dump(doc, f)
    assert run(["zigzag", path]) == 4


def test_zigzag_certifies_the_jump(capsys, scenario_file):
    report = _run_json(capsys, ["zigzag", scenario_file(teleport_jump()), "--no-timings"])
    assert report["scenario"] == "teleportB"
    assert [v["verdict"] for v in report["verdicts"]] == ["no_evasion_certified"]
    assert "timings" not in report
    assert report["barcodes"]["H1"]["field"] == 2


def test_output_is_byte_identical(scenario_file, tmp_path):
    path = scenario_file(teleport_orbit())
    first, second = tmp_path / "one.json", tmp_path / "two.json"
    for out in (first, second):
        assert run(["zigzag", path, "--no-timings", "-o", str(out)]) == 0
    assert first.read_bytes() == second.read_bytes()
    svg = tmp_path / "bars.svg"
    assert run(["render", path, "-o", str(svg)]) == 0
    assert svg.read_text().lstrip().startswith("<?xml")


def test_simulated_stream_feeds_the_criteria(capsys, scenario_file, tmp_path):
    stream = tmp_path / "stream.json"
    assert run(["simulate", scenario_file(teleport_jump()), "-o", str(stream)]) == 0
    assert "events" in json.loads(stream.read_text())
    report = _run_json(capsys, ["zigzag", str(stream), "--no-timings"])
    assert report["verdicts"][0]["verdict"] == "no_evasion_certified"
    assert run(["oracle", str(stream)]) == 3


def test_evade_as_dot(capsys, scenario_file):
    assert run(["evade", scenario_file(cartoon_yes_no("down")), "--format", "dot"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("digraph reeb {")
    assert out.rstrip().endswith("}")


def test_reports_merge_by_scenario(capsys, scenario_file, tmp_path):
    path = scenario_file(teleport_jump())
    zz, dsg = tmp_path / "zz.json", tmp_path / "dsg.json"
    assert run(["zigzag", path, "--no-timings", "-o", str(zz)]) == 0
    assert run(["dsg", path, "--no-timings", "-o", str(dsg)]) == 0
    merged = _run_json(capsys, ["report", "--merge", str(zz), str(dsg)])
    assert sorted(v["criterion"] for v in merged["verdicts"]) == ["dsg", "zigzag"]
    assert merged["disagreements"] == []

    other = tmp_path / "other.json"
    assert run(["zigzag", scenario_file(teleport_orbit()), "--no-timings", "-o", str(other)]) == 0
    assert run(["report", "--merge", str(zz), str(other)]) == 1


def test_merge_refuses_nothing_and_mixed_digests():
    with pytest.raises(ValueError):
        merge_reports([])
    a = AnalysisReport(scenario="x", digest="1", verdicts=[])
    b = AnalysisReport(scenario="y", digest="2", verdicts=[])
    with pytest.raises(EvasionError):
        merge_reports([a, b])


def test_analyze_records_refusals_as_verdicts():
    report = analyze(stacked_cech(), ReportOptions(oracle=False, timings=False))
    table = {v.criterion: v.verdict for v in report.verdicts}
    assert table["dsg"] == "error:EmptyFenceError"
    assert set(report.barcodes) == {"H0", "H1"}
    assert report.barcodes["H0"].n == 1
    assert report.timings is None
    assert report.disagreements == []


@pytest.mark.parametrize("verdicts, expected", [
    ({"oracle": "evasion", "zigzag": "no_evasion_certified"}, 1),
    ({"oracle": "evasion", "dsg": "no_evasion_certified", "rotation": "no_evasion"}, 2),
    ({"oracle": "no_evasion", "zigzag": "evasion_possible", "dsg": "inconclusive", "rotation": "no_evasion"}, 0),
    ({"oracle": "evasion", "rotation": "error:ConnectivityViolation"}, 0),
    ({"zigzag": "no_evasion_certified"}, 0),
    ({"zigzag": "no_evasion_certified", "dsg": "inconclusive"}, 1),
    ({"oracle": "no_evasion", "zigzag": "evasion_possible", "dsg": "no_evasion_certified"}, 1),
    ({"zigzag": "no_evasion_certified", "dsg": "error:EmptyFenceError"}, 0),
])
def test_implication_table(verdicts, expected):
    assert len(implication_violations(verdicts)) == expected


def test_dsg_and_zigzag_disagreement_is_reported_without_an_oracle():
    messages = implication_violations({"zigzag": "no_evasion_certified", "dsg": "inconclusive"})
    assert messages == ["dsg_zigzag disagree: dsg says inconclusive but zigzag says no_evasion_certified"]
    assert "dsg_zigzag" in IMPLICATIONS


def test_violation_rate():
    assert violation_rate([]) == 0.0
    assert violation_rate([[], ["x"], [], []]) == 0.25


def test_suite_over_a_small_directory(tmp_path):
    for scenario in (teleport_jump(), stacked_cech()):
        (tmp_path / f"{scenario.name}.json").write_text(dump_scenario(scenario))
    report = evaluate_suite(str(tmp_path), h=0.1, max_workers=1)
    assert [row.scenario for row in report.rows] == ["stackedCech", "teleportB"]
    stacked, jump = report.rows
    assert stacked.verdicts["dsg"] == "error:EmptyFenceError"
    assert stacked.violations == []
    assert jump.verdicts["oracle"] == "no_evasion"
    assert jump.verdicts["zigzag"] == "no_evasion_certified"
    assert jump.verdicts["dsg"] == "no_evasion_certified"
    assert not any(v.startswith(("zigzag", "dsg")) for v in jump.violations)
    assert report.implications == IMPLICATIONS


def test_whole_fixture_suite_is_consistent(tmp_path):
    write_fixtures(str(tmp_path))
    report = evaluate_suite(str(tmp_path), h=0.1)
    rows = {row.scenario: row.verdicts for row in report.rows}
    assert set(rows) == set(FIXTURES)
    assert report.violation_count == 0
    assert report.implications["dsg_zigzag"] == IMPLICATIONS["dsg_zigzag"]
    assert not any(v.startswith("dsg_zigzag") for row in report.rows for v in row.violations)
    for name, verdicts in rows.items():
        if verdicts["oracle"] == "evasion" and name != "stackedCech":
            assert verdicts["zigzag"] == "evasion_possible", name
        if name in CONNECTED:
            assert (verdicts["dsg"] == "no_evasion_certified") == (verdicts["zigzag"] == "no_evasion_certified"), name
            assert not verdicts["rotation"].startswith("error"), name
    # a full-length bar without an evasion path
    assert rows["cartoonNo"]["zigzag"] == "evasion_possible"
    assert rows["cartoonNo"]["oracle"] == "no_evasion"
    assert rows["cartoonYesNoA"]["oracle"] == "evasion"
    assert rows["cartoonYesNoB"]["oracle"] == "no_evasion"
    for name in ("needConnectedA", "needConnectedB"):
        assert rows[name]["rotation"] == "error:ConnectivityViolation"
