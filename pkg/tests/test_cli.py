import json
import subprocess
import sys

import pytest

from h1wb.cli import main, run


def strip_timings(report):
    return {k: v for k, v in report.items() if k != "timings"}


def test_gadget_verify():
    res = run(["gadget", "verify"])
    assert res.code == 0
    r = res.report["result"]
    assert r["P1"] and r["P2"] and r["P3"]
    assert (r["extendable"], r["boundary_assignments"], r["eqeq_extendable_minus_d"]) == (36, 81, 9)


def test_sigma_k4_is_nontrivial():
    res = run(["cond", "trivial", ":sigma:K4"])
    assert res.code == 1
    assert "nontrivial" in json.dumps(res.report["result"])


def test_k3_has_no_siggers():
    res = run(["clone", "siggers", ":K3"])
    assert res.code == 1 and "witness" not in res.report


def test_yes_answers_carry_checked_witnesses():
    res = run(["clone", "siggers", ":loop"])
    assert res.code == 0 and res.report["checked"] is True and "witness" in res.report


def test_files_and_formats(tmp_path):
    g = tmp_path / "c5.txt"
    g.write_text("g 5\ne 0 1\ne 1 2\ne 2 3\ne 3 4\ne 4 0\n")
    res = run(["graph", "color", str(g)])
    assert res.code == 0 and res.report["checked"] is True
    assert res.report["inputs"]["graph"] != "builtin:C5"
    inst = tmp_path / "i.txt"
    inst.write_text("p csp 3 3\na 0 1\na 1 2\na 2 0\n")
    assert run(["css", "solve", ":K4", str(inst)]).code == 0


def test_input_errors(tmp_path):
    assert run(["graph", "color", str(tmp_path / "missing.txt")]).code == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("g 3\ne 0 nine\n")
    res = run(["graph", "color", str(bad)])
    assert res.code == 2 and res.error
    assert run(["cond", "builtin", "maltsev"]).code == 2
    assert run(["graph", "frobnicate"]).code == 2


def test_resource_limit():
    assert run(["clone", "quotient", ":K3", "--n", "30"]).code == 3


def test_timeout_env(monkeypatch):
    monkeypatch.setenv("H1WB_TIMEOUT_MS", "1")
    assert run(["clone", "fgraph", ":K3"]).code == 3


def test_deterministic_reports():
    argv = ["cond", "derive", ":sigma:K4", ":sigma:K3"]
    a, b = run(argv).report, run(argv).report
    assert strip_timings(a) == strip_timings(b)
    assert a["digest"] == b["digest"]
    # --seed and --jobs do not change the result
    c = run(["--seed", "5", "--jobs", "4"] + argv).report
    assert c["digest"] == a["digest"]


def test_text_format(capsys):
    assert main(["--format", "text", "graph", "hom", ":C5", ":K3"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("graph hom: yes") and "digest:" in out


def test_json_output(capsys):
    assert main(["growth", "alpha"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["answer"] is True and "timings" in data


@pytest.mark.parametrize("argv,code", [
    (["graph", "hom", ":K4", ":K3"], 1),
    (["css", "bounds", "--n", "2"], 0),
    (["clone", "pp", ":K3", "(exists (y) (E x y))", "0"], 0),
    (["clone", "pp", ":K3", "(E x x)", "0"], 1),
    (["clone", "minionp", ":K3"], 0),
    (["cond", "entails", ":qnu3", "--identity", "2 f 0 0 1 = f 0 1 0"], 0),
])
def test_exit_codes(argv, code):
    assert run(argv).code == code


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "h1wb", "graph", "critical", ":K4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["checked"] is True
