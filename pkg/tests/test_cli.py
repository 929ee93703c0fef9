import io
import subprocess
import sys

import pytest

from dlp.cli import Repl, main

BOSTON_KB = "(theory Boston (rule ((Observe WeekdayAt5PM)) (TrafficJam)) (assert (not (TrafficJam))))\n"


@pytest.fixture
def kb(tmp_path):
    p = tmp_path / "boston.kb"
    p.write_text(BOSTON_KB)
    return p


def run(argv, stdin=""):
    out = io.StringIO()
    code = main(argv, out=out, stdin=io.StringIO(stdin))
    return code, out.getvalue()


def repl(lines, **kw):
    out = io.StringIO()
    r = Repl(out, **kw)
    code = r.run_lines(lines)
    return code, out.getvalue().splitlines()


def test_blocked_contraposition_message(kb):
    code, out = run(["prove", "Boston", "(not (Observe WeekdayAt5PM))", "--kb", str(kb)])
    assert code == 0
    assert out.strip() == "not derivable (definitive); blocked: contraposition of rule A1"


def test_decide_after_observation(kb):
    _, out = repl([f"load {kb}", "theory Boston", "assert (Observe WeekdayAt5PM)", "decide (TrafficJam)"])
    assert out[-1].startswith("provable; derivation d")


def test_why_reiteration_is_one_node(kb):
    _, out = repl([f"load {kb}", "theory Boston", "prove (not TrafficJam)", "why d0"])
    assert out[-2] == "provable; derivation d0"
    assert out[-1] == "reiteration ← assertion A2  (d0: (not TrafficJam), direct)"


def test_why_tree_indents_children(kb):
    _, out = repl([f"load {kb}", "theory Boston", "assert (Observe WeekdayAt5PM)", "prove TrafficJam", "why d1"])
    tree = out[out.index(next(l for l in out if l.startswith("rule-application"))):]
    assert tree[0].startswith("rule-application")
    assert "A1" in tree[0]
    assert tree[1].startswith("  reiteration ← assertion A3")


def test_why_labels_planner_and_closed_world_layers():
    _, out = repl(
        [
            "theory T",
            "implies Raining WetStreets",
            "assert Raining",
            "prove WetStreets",
            "why d0",
            "thnot-assert (FlightDelayed)",
            "prove (not FlightDelayed)",
            "why d1",
        ]
    )
    assert out[2] == "asserted A2; triggered A3 WetStreets [planner]"
    assert out[4] == "reiteration ← assertion A3  (d0: WetStreets, planner)"
    assert out[7] == "reiteration ← assertion A4  (d1: (not FlightDelayed), closed-world)"


def test_domain_errors_do_not_stop_the_repl():
    code, out = repl(["theory T", "frobnicate", "why d99", "assert P", "quit"])
    assert code == 0
    assert out[-1] == "asserted A1" or out[-2] == "asserted A1"
    assert sum(l.startswith("error:") for l in out) == 2


def test_parse_error_exit_code_in_batch(tmp_path):
    bad = tmp_path / "bad.kb"
    bad.write_text("(theory X (assert")
    code, out = run(["run", str(bad)])
    assert code == 2
    assert "1:11" in out


def test_io_error_exit_code(tmp_path):
    script = tmp_path / "s.txt"
    script.write_text("theory T\nexport /nonexistent-dir/x.json\n")
    code, out = run(["repl", str(script)])
    assert code == 1
    assert "/nonexistent-dir/x.json" in out


def test_missing_kb_file_is_io_error(tmp_path):
    code, _ = run(["run", str(tmp_path / "nope.kb")])
    assert code == 1


def test_quit_exit_code():
    code, _ = run(["repl"], stdin="theory T\nquit\nassert P\n")
    assert code == 0


def test_export_subcommand(kb, tmp_path):
    out_json = tmp_path / "b.json"
    code, out = run(["export", "Boston", str(out_json), "--kb", str(kb)])
    assert code == 0
    assert out.startswith("wrote ")
    assert '"theory": "Boston"' in out_json.read_text()


def test_no_plans_flag(tmp_path):
    p = tmp_path / "k.kb"
    p.write_text("(theory K (implies P Q))\n")
    _, with_plans = run(["run", str(p)])
    _, without = run(["run", "--no-plans", str(p)])
    assert "4 plan(s)" in with_plans and "0 plan(s)" in without


def test_budget_flag_and_env(kb, monkeypatch):
    code, out = run(["prove", "Boston", "(TrafficJam)", "--kb", str(kb), "--budget", "1"])
    assert code == 0 and out.strip()
    monkeypatch.setenv("DLP_BUDGET", "1")
    assert run(["prove", "Boston", "(TrafficJam)", "--kb", str(kb)])[0] == 0


def test_argue_and_args(kb):
    _, out = repl(
        [
            f"load {kb}",
            "theory Boston",
            "argue TrafficJam pro d0 alice",
            'argue arg1 con "sensor fault" bob',
            "args arg1",
        ]
    )
    assert out[-1] == "arg2 con by bob: sensor fault"


def test_audit_fixed_decimals(kb):
    _, out = repl(
        [
            f"load {kb}",
            "theory Boston",
            "prob (cond TrafficJam WeekdayAt5PM 1)",
            "prob (marginal TrafficJam 0)",
            "audit",
        ]
    )
    assert out[-1].startswith("P(WeekdayAt5PM) <= 0.000000 forced by")
    assert out[-1].endswith("contrapositive of rule A1")


def test_batch_transcript_is_byte_identical(kb, tmp_path):
    script = tmp_path / "s.txt"
    script.write_text(
        f"load {kb}\ntheory Boston\nassert (Observe WeekdayAt5PM)\ninconsistencies\n"
        "implies? P P\ngoal (Foo ?x)\nthnot-assert (Late)\nshow\n"
    )
    first = run(["repl", str(script)])
    assert all(run(["repl", str(script)]) == first for _ in range(3))


def test_console_script_entry_point(kb):
    r = subprocess.run(
        [sys.executable, "-m", "dlp", "prove", "Boston", "(not (Observe WeekdayAt5PM))", "--kb", str(kb)],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0
    assert "blocked: contraposition of rule A1" in r.stdout
