"""Command-line interface: exit codes, printed values, report schema."""

import json
import shutil
import subprocess
import sys

import pytest

from qheis.cli import SUITES, run
from qheis.vertexops import LAWS

REPORT_KEYS = {"suite", "params", "window", "status", "laws", "failures",
               "seed", "elapsed_ms"}


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("QHEIS_WINDOW", raising=False)
    monkeypatch.delenv("QHEIS_FIXED_CLOCK", raising=False)


def out_of(capsys):
    return capsys.readouterr().out.strip()


def test_usage_paths(capsys):
    assert run([]) == 2
    assert run(["--help"]) == 0
    assert run(["no-such-command"]) == 2
    capsys.readouterr()


def test_expand_prints_directed_table(capsys):
    code = run(["expand", "--kernel", "1/(x1-x2)",
                "--direction", "x2,x1", "--window", "3"])
    assert code == 0
    assert out_of(capsys) == \
        "(-1)*x2^-3*x1^2 + (-1)*x2^-2*x1 + (-1)*x2^-1"


def test_expand_rejects_bad_input(capsys):
    assert run(["expand", "--kernel", "1/(x1", "--direction", "x1"]) == 2
    assert run(["expand", "--kernel", "1/(x1-x2)",
                "--direction", "x1"]) == 2
    err = capsys.readouterr().err
    assert "error:" in err


def test_bracket_values(capsys):
    assert run(["bracket", "--algebra", "bhatq", "--r", "1", "--s", "0",
                "--m", "3", "--n", "-3"]) == 0
    assert out_of(capsys) == "-3"
    assert run(["bracket", "--algebra", "hq", "--m", "2", "--n", "-2",
                "--q0", "3/5", "--l0", "2"]) == 0
    assert out_of(capsys) == "34/15"


def test_bracket_usage_errors(capsys):
    assert run(["bracket", "--algebra", "nope", "--m", "1", "--n", "-1"]) == 2
    assert run(["bracket", "--algebra", "hq", "--m", "1", "--n", "-1",
                "--r", "1"]) == 2
    assert run(["bracket", "--algebra", "hq", "--m", "1", "--n", "-1",
                "--q0", "3/5"]) == 2
    assert run(["bracket", "--algebra", "hq", "--m", "1", "--n", "-1",
                "--q0", "1", "--l0", "2"]) == 2
    capsys.readouterr()


def test_fock_apply(capsys):
    assert run(["fock-apply", "--algebra", "bhatq",
                "--word=-2:1,-1:0"]) == 0
    assert out_of(capsys) == "(1) b(1)_-2 b(0)_-1 vac"
    assert run(["fock-apply", "--algebra", "bhatq", "--word=2:a"]) == 2
    assert run(["fock-apply", "--algebra", "bhatq", "--word=,"]) == 2
    capsys.readouterr()


def test_phi_product_outputs(capsys):
    assert run(["phi-product", "--algebra", "hq", "--r", "1", "--s", "0",
                "--n", "0"]) == 0
    assert out_of(capsys) == "(q*l/(q^2 - 1)) 1_W"
    assert run(["phi-product", "--algebra", "hq", "--n", "0"]) == 0
    assert out_of(capsys) == "0"
    assert run(["phi-product", "--algebra", "bhatq", "--n", "0"]) == 2
    capsys.readouterr()


def test_verify_report_document(tmp_path, capsys):
    target = tmp_path / "report.json"
    code = run(["verify", "--law", "hq-commutator-delta", "--window", "3",
                "--json", "--seed", "7", "--out", str(target)])
    assert code == 0
    text = capsys.readouterr().out
    doc = json.loads(text)
    assert set(doc) == REPORT_KEYS
    assert doc["suite"] == "verify"
    assert doc["status"] == "pass"
    assert doc["window"] == 3
    assert doc["seed"] == 7
    assert doc["failures"] == []
    assert len(doc["laws"]) == 1
    assert doc["laws"][0]["law"].startswith("hq-commutator-delta")
    assert doc["laws"][0]["status"] == "pass"
    assert doc["laws"][0]["checked"] > 0
    assert target.read_text() == text


def test_verify_parameters(capsys):
    code = run(["verify", "--law", "hq-commutator-delta", "--window", "3",
                "--param", "r=2", "--param", "s=1", "--json"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["params"]["r"] == 2
    assert "r=2" in doc["laws"][0]["law"]
    assert run(["verify", "--law", "hq-commutator-delta",
                "--param", "rho"]) == 2
    assert run(["verify", "--law", "hq-commutator-delta", "--window", "3",
                "--param", "zz=1"]) == 2
    capsys.readouterr()


def test_verify_exit_one_on_inconclusive(capsys):
    code = run(["verify", "--law", "hq-quasi-locality", "--window", "1",
                "--json"])
    assert code == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "inconclusive"
    assert doc["failures"]
    assert doc["failures"][0]["detail"].startswith("inconclusive:")


def test_verify_unknown_law(capsys):
    assert run(["verify", "--law", "frobnicate"]) == 2
    assert "unknown law" in capsys.readouterr().err


def test_verify_numeric_mode(capsys):
    code = run(["verify", "--law", "htq-commutator-kernel-form",
                "--window", "3", "--q0", "3/5", "--l0", "2", "--json"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["params"]["q0"] == "3/5"
    assert doc["status"] == "pass"


def test_suite_document(capsys):
    code = run(["suite", "--suite", "fast", "--window", "4", "--json"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc) == REPORT_KEYS
    assert doc["suite"] == "fast"
    assert doc["status"] == "pass"
    assert doc["window"] == 4
    names = sorted(e["law"].split("[")[0] for e in doc["laws"])
    assert names == sorted(LAWS)
    assert all(e["status"] == "pass" for e in doc["laws"])


def test_suite_rejects_unknown(capsys):
    assert run(["suite", "--suite", "nope"]) == 2
    capsys.readouterr()


def test_suite_defaults_registered():
    assert SUITES == {"paper-all": 8, "fast": 5}


def test_text_mode_summary_line(capsys):
    code = run(["verify", "--law", "bhat-commutator-delta", "--window", "3"])
    assert code == 0
    lines = out_of(capsys).splitlines()
    assert lines[0].split()[0] == "bhat-commutator-delta"
    assert lines[-1].startswith("suite=verify status=pass")


def test_fixed_clock_reports_are_identical(monkeypatch, capsys):
    monkeypatch.setenv("QHEIS_FIXED_CLOCK", "1")
    argv = ["verify", "--law", "htq-commutator-euler-form",
            "--window", "3", "--json"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    second = capsys.readouterr().out
    assert first == second
    assert json.loads(first)["elapsed_ms"] == 0


def test_window_env_override(monkeypatch, capsys):
    monkeypatch.setenv("QHEIS_WINDOW", "3")
    code = run(["verify", "--law", "hq-commutator-delta", "--json"])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["window"] == 3
    monkeypatch.setenv("QHEIS_WINDOW", "wide")
    assert run(["verify", "--law", "hq-commutator-delta"]) == 2
    capsys.readouterr()


def test_console_script_runs():
    script = shutil.which("qheis")
    cmd = [script] if script else [sys.executable, "-m", "qheis.cli"]
    proc = subprocess.run(
        cmd + ["bracket", "--algebra", "hq", "--m", "1", "--n", "-1"],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "1"
