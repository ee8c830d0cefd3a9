import json
import subprocess
import sys

import pytest

from crralloc.cli import main
from crralloc import welfare
from crralloc.formats import parse_allocation, parse_instance, serialize_instance


@pytest.fixture
def worked_file(tmp_path, worked_example):
    path = tmp_path / "worked.inst"
    path.write_text(serialize_instance(worked_example))
    return path


def test_solve_um_crr(worked_file, tmp_path, capsys):
    out = tmp_path / "alloc.txt"
    assert main(["solve", str(worked_file), "--goal", "um-crr", "-o", str(out)]) == 0
    assert out.read_text() == "0: 0 2 4\n1: 0 2 5\n2: 1 3 5\n3: 1 3 4\n"
    summary = capsys.readouterr().out
    assert "welfare 45" in summary and "EF1 1.000000" in summary


def test_solve_null_and_threshold(worked_file, tmp_path, capsys):
    inst = parse_instance(worked_file.read_text())
    for goal in ("null", "um-threshold:40", "um", "rm", "rm-crr", "nash", "egal", "lsowa", "nash-crr"):
        out = tmp_path / f"{goal}.txt"
        assert main(["solve", str(worked_file), "--goal", goal, "-o", str(out)]) == 0
        alloc = parse_allocation(out.read_text(), inst.n)
        alloc.validate(inst)
        if goal == "um-threshold:40":
            assert welfare(inst, alloc) >= 40


def test_solve_then_evaluate(worked_file, tmp_path, capsys):
    out = tmp_path / "alloc.txt"
    main(["solve", str(worked_file), "-o", str(out)])
    capsys.readouterr()
    report = tmp_path / "report.csv"
    assert main(["evaluate", str(worked_file), str(out), "-o", str(report)]) == 0
    text = capsys.readouterr().out
    assert text == report.read_text()
    assert "worked,given,EF1,1" in text


def test_evaluate_nash_optimum_allocation(tmp_path, capsys, two_agent_balanced):
    inst = tmp_path / "two.inst"
    inst.write_text(serialize_instance(two_agent_balanced))
    alloc = tmp_path / "a.txt"
    alloc.write_text("0: 2 3\n1: 0 1\n")
    assert main(["evaluate", str(inst), str(alloc)]) == 0
    assert "EF1,0.5" in capsys.readouterr().out


def test_evaluate_rejects_bad_allocation(worked_file, tmp_path, capsys):
    alloc = tmp_path / "bad.txt"
    alloc.write_text("0:\n1:\n2:\n3:\n")
    assert main(["evaluate", str(worked_file), str(alloc)]) == 2
    assert capsys.readouterr().err.startswith("error: IncompleteAllocation:")
    alloc.write_text("0: 9\n")
    assert main(["evaluate", str(worked_file), str(alloc)]) == 2


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.inst"
    bad.write_text("agents two\n")
    assert main(["solve", str(bad)]) == 2
    assert capsys.readouterr().err.startswith("error: ParseError:")
    assert main(["solve", str(tmp_path / "missing.inst")]) == 2


def test_unknown_flag_and_goal(worked_file, capsys):
    assert main(["solve", str(worked_file), "--frobnicate"]) == 2
    assert main(["solve", str(worked_file), "--goal", "best"]) == 2


def test_budget_exit_code(tmp_path, capsys):
    path = tmp_path / "big.inst"
    lines = ["agents 6", "items 14", "agentcap * 2 3", "itemcap * 1 1"]
    lines += [f"util {i}: " + ",".join(str((7 * i + 3 * o) % 19 + 1) for o in range(14)) for i in range(6)]
    path.write_text("\n".join(lines) + "\n")
    assert main(["solve", str(path), "--goal", "nash", "--bnb-budget", "5"]) == 3
    assert "BudgetExceeded" in capsys.readouterr().err


def test_trace(worked_file, capsys):
    assert main(["trace", str(worked_file), "--goal", "um-crr"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[8:10] == ["PICK 0 4 3", "PICK 3 4 3"]
    assert main(["trace", str(worked_file), "--goal", "um"]) == 2


def test_generate_identical_agents(tmp_path):
    out = tmp_path / "g.inst"
    assert main(["generate", "--mallows", "phi=0", "n=2", "m=3", "seed=7", "-o", str(out)]) == 0
    inst = parse_instance(out.read_text())
    assert inst.profile[0] == inst.profile[1] == ((0,), (1,), (2,))
    assert main(["generate", "--mallows", "phi=2", "n=2", "m=3"]) == 2
    assert main(["generate", "--mallows", "phi=0", "n=2"]) == 2


def test_generate_from_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 3, "m": 4, "agent_caps": [1, 2], "item_caps": [1, 1], "phis": [0.5], "trials": 2}))
    assert main(["generate", "--config", str(cfg), "--out-dir", str(tmp_path / "inst")]) == 0
    assert len(list((tmp_path / "inst").iterdir())) == 2


def test_experiment_command(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "n": 3, "m": 4, "agent_caps": [1, 2], "item_caps": [1, 1], "phis": [0.0, 0.5],
        "trials": 2, "objectives": ["UM", "UM-CRR"], "notions": ["NEF1"],
    }))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["experiment", str(cfg), "-o", str(a)]) == 0
    assert main(["experiment", str(cfg), "-o", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    data = [r for r in a.read_text().splitlines()[1:] if ",mean," not in r and ",std," not in r]
    assert len(data) == 2 * 2 * 2
    cfg.write_text('{"trials": 0}')
    assert main(["experiment", str(cfg)]) == 2
    cfg.write_text("{not json")
    assert main(["experiment", str(cfg)]) == 2


def test_module_entry_point(worked_file):
    proc = subprocess.run(
        [sys.executable, "-m", "crralloc", "trace", str(worked_file)], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout.startswith("PICK 0 0 1")
