import json
import subprocess
import sys
from pathlib import Path

import pytest

from relcube import cli

DATA = Path(__file__).parent / "data"

REPORT_KEYS = {
    "value", "mode", "abs_bound", "rel_estimate", "qc_g", "big_m", "eps",
    "mu", "rule", "n1", "nodes_evaluated", "h", "h_star", "max_k_star",
    "bounds", "roundoff_floor", "converged", "warnings",
    "refinement_history", "wall_time_s", "config", "display",
}

EX2_INLINE = ["--g", "sin(x*y)/5", "--a", "1", "--b", "4",
              "--l", "x", "--u", "2*x^2"]


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_integrate_inline_structured(capsys):
    code, out, _ = run_cli(capsys, "integrate", *EX2_INLINE,
                           "--eps", "1e-4", "--out", "structured")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == REPORT_KEYS
    assert doc["mode"] == "absolute"
    assert doc["value"] == pytest.approx(-0.00734, abs=2e-5)
    assert doc["abs_bound"] == pytest.approx(0.00186, rel=1e-3)
    assert doc["display"]["abs_bound"].startswith("1.8600")
    assert doc["config"]["problem"]["g_expr"] == "sin(x*y)/5"
    assert doc["config"]["eps"] == 1e-4
    assert doc["wall_time_s"] > 0
    assert doc["nodes_evaluated"] > 0


def test_integrate_text_report(capsys):
    code, out, _ = run_cli(capsys, "integrate", *EX2_INLINE, "--eps", "1e-4")
    assert code == 0
    assert "mode          = absolute" in out
    assert "value" in out and "rel_estimate" in out


def test_integrate_problem_file(capsys):
    code, out, _ = run_cli(capsys, "integrate",
                           "--problem-file", str(DATA / "ex2.problem"),
                           "--eps", "1e-4", "--out", "structured")
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(-0.00734, abs=2e-5)


def test_integrate_bounds_file_reproduction(capsys):
    # The bounds file pins the published suprema; the full pipeline then
    # reproduces the reference value to the reported estimate.
    code, out, _ = run_cli(capsys, "integrate",
                           "--g", "exp(4*x*y)", "--a", "1", "--b", "2",
                           "--l", "x^2/5", "--u", "x^3/5",
                           "--rule", "simpson", "--eps", "1e-10",
                           "--bounds-file", str(DATA / "ex1.bounds"),
                           "--out", "structured")
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(1.92660e3, rel=1e-5)
    assert doc["n1"] == 1810
    assert doc["mode"] == "relative"
    assert doc["bounds"]["provenance"] == "injected"


def test_integrate_problem_file_with_bounds_section(capsys):
    code, out, _ = run_cli(capsys, "integrate",
                           "--problem-file", str(DATA / "ex1.problem"),
                           "--eps", "1e-10", "--out", "structured")
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(1.92660e3, rel=1e-5)


def test_refinement_flags(capsys):
    code, out, _ = run_cli(capsys, "integrate", *EX2_INLINE,
                           "--target-abs", "1e-4", "--out", "structured")
    assert code == 0
    doc = json.loads(out)
    assert doc["abs_bound"] < 1e-4
    assert doc["converged"] is True


def test_usage_error_no_problem(capsys):
    code, _, err = run_cli(capsys, "integrate", "--eps", "1e-4")
    assert code == 2
    assert "no problem given" in err


def test_usage_error_two_sources(capsys):
    code, _, err = run_cli(capsys, "integrate", *EX2_INLINE,
                           "--problem-file", str(DATA / "ex2.problem"),
                           "--eps", "1e-4")
    assert code == 2
    assert "not both" in err


def test_usage_error_incomplete_inline(capsys):
    code, _, err = run_cli(capsys, "integrate", "--g", "x*y", "--a", "0",
                           "--eps", "1e-4")
    assert code == 2
    assert "--g, --a, --b, --l, --u" in err


def test_usage_error_conflicting_targets(capsys):
    code, _, err = run_cli(capsys, "integrate", *EX2_INLINE,
                           "--target-rel", "1e-5", "--target-abs", "1e-5")
    assert code == 2
    assert "mutually exclusive" in err


def test_usage_error_no_eps_no_target(capsys):
    code, _, err = run_cli(capsys, "integrate", *EX2_INLINE)
    assert code == 2
    assert "--eps" in err


def test_usage_error_bad_expression(capsys):
    code, _, err = run_cli(capsys, "integrate", "--g", "sin(x*", "--a", "0",
                           "--b", "1", "--l", "0", "--u", "1",
                           "--eps", "1e-4")
    assert code == 2
    assert "position 6" in err


def test_numeric_error_tolerance_floor(capsys):
    code, _, err = run_cli(capsys, "integrate",
                           "--g", "x*y", "--a", "0", "--b", "1",
                           "--l", "0", "--u", "1",
                           "--eps", "1e-20", "--mu", "1e-16")
    assert code == 3
    assert "roundoff floor" in err


def test_numeric_error_crossing_limits(capsys):
    code, _, err = run_cli(capsys, "integrate",
                           "--g", "x*y", "--a", "0", "--b", "1",
                           "--l", "1-x", "--u", "x", "--eps", "1e-4")
    assert code == 3
    assert "crossing limits" in err


def test_describe_rule(capsys):
    code, out, _ = run_cli(capsys, "describe-rule", "--rule", "simpson",
                           "--out", "structured")
    assert code == 0
    doc = json.loads(out)
    assert doc["order_r"] == 4
    assert doc["err_const_A"] == pytest.approx(16 / 180)
    assert doc["panel_weights"] == [1 / 6, 4 / 6, 1 / 6]


def test_describe_rule_text(capsys):
    code, out, _ = run_cli(capsys, "describe-rule", "--rule", "trapezium")
    assert code == 0
    assert "order_r" in out and "2" in out


def test_check_bounds(capsys):
    code, out, _ = run_cli(capsys, "check-bounds", *EX2_INLINE,
                           "--grid", "101", "--out", "structured")
    assert code == 0
    doc = json.loads(out)
    assert doc["big_m"] == pytest.approx(18.6, rel=1e-2)
    assert doc["d"] == pytest.approx(28 / 31, rel=1e-6)
    assert doc["m1"] == 3.0 and doc["m2"] == 31.0
    assert doc["provenance"] == "grid-estimated"


def test_structured_output_schema_stable(capsys):
    # golden schema: key sets must not drift across runs or problems
    _, out1, _ = run_cli(capsys, "integrate", *EX2_INLINE, "--eps", "1e-2",
                         "--out", "structured")
    _, out2, _ = run_cli(capsys, "integrate",
                         "--problem-file", str(DATA / "ex2.problem"),
                         "--eps", "1e-3", "--out", "structured")
    doc1, doc2 = json.loads(out1), json.loads(out2)
    assert set(doc1) == set(doc2) == REPORT_KEYS
    assert set(doc1["display"]) == set(doc2["display"])
    assert set(doc1["bounds"]) == set(doc2["bounds"])


def test_console_script_installed():
    proc = subprocess.run([sys.executable, "-m", "relcube.cli",
                           "describe-rule", "--rule", "simpson"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "order_r" in proc.stdout


def test_missing_problem_file(capsys):
    code, _, err = run_cli(capsys, "integrate",
                           "--problem-file", "/nonexistent.ini",
                           "--eps", "1e-4")
    assert code == 2
    assert "cannot read" in err
