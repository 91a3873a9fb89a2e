import json
import subprocess
import sys

import pytest

from cmll.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    doc = json.loads(out)
    assert doc["schema"] == "1"
    return doc


def test_hilbert_example(capsys):
    doc = run_json(capsys, "cm", "hilbert", "-d", "1")
    assert doc["poly"] == ["-1728", "1"]
    assert run_json(capsys, "cm", "hilbert", "-d", "5")["poly"] == ["-681472000", "-1264000", "1"]


def test_rayclass_order_example(capsys):
    doc = run_json(capsys, "rayclass", "order", "-d", "1", "-f", "3")
    assert doc["order"] == 2 and doc["elementary_divisors"] == [2]
    assert run_json(capsys, "rayclass", "order", "-d", "1", "-f", "2+1*w")["order"] == 1


def test_rayclass_dlog(capsys):
    doc = run_json(capsys, "rayclass", "dlog", "-d", "5", "-f", "1", "-a", "2;1+w")
    assert doc["class"] != 0
    assert run_json(capsys, "rayclass", "dlog", "-d", "5", "-f", "1", "-a", "3+w")["class"] == 0


def test_exit_codes(capsys):
    assert run(capsys, "field", "info", "-d", "4")[0] == 3
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "field", "info")[0] == 2
    assert run(capsys, "rayclass", "dlog", "-d", "1", "-f", "3", "-a", "3")[0] == 3
    assert run(capsys, "ideal", "info", "-d", "1", "-a", "2+x")[0] == 3
    code, _, err = run(capsys, "cm", "hilbert", "-d", "1", "--bits", "16")
    assert code == 3 and "error" in err


def test_field_and_ideal(capsys):
    doc = run_json(capsys, "field", "info", "-d", "23")
    assert doc["class_number"] == 3 and doc["disc"] == -23
    doc = run_json(capsys, "ideal", "info", "-d", "5", "-a", "2;1+w")
    assert doc["ideal"]["hnf"] == [2, 1, 1] and doc["prime"] and not doc["principal"]
    doc = run_json(capsys, "ideal", "mul", "-d", "5", "-a", "2;1+w", "-b", "2;1+w")
    assert doc["product"]["hnf"] == [2, 0, 2]


def test_witt_commands(capsys):
    doc = run_json(capsys, "witt", "poly", "-p", "2", "-n", "2")
    assert doc["S"][1] == {"0,0,0,1": 1, "0,1,0,0": 1, "1,0,1,0": -1}
    doc = run_json(capsys, "witt", "add", "-p", "2", "-n", "2", "--x", "1,0", "--y=-1,-1")
    assert doc["result"]["coords"] == [0, 0]
    doc = run_json(capsys, "witt", "mul", "-d", "1", "-p", "1+w", "-n", "2", "--x", "1,0", "--y", "3+w,2")
    assert doc["result"]["coords"] == ["3+1*w", "2+0*w"]
    assert run(capsys, "witt", "poly", "-p", "4", "-n", "2")[0] == 3


def test_lambda_commands(capsys):
    assert run_json(capsys, "lambda", "verify", "--carrier", "okx", "-d", "1")["pass"]
    assert run_json(capsys, "lambda", "verify", "--carrier", "okt", "-d", "5", "--bound", "8", "--samples", "4")["pass"]


def test_lt_commands(capsys):
    doc = run_json(capsys, "lt", "law", "-p", "2", "--f", "mult", "--deg", "6", "--prec", "5")
    assert doc["law"] == {"0,1": "1", "1,0": "1", "1,1": "1"}
    doc = run_json(capsys, "lt", "endo", "-p", "2", "--f", "mult", "-a", "3", "--deg", "4", "--prec", "5")
    assert doc["series"] == ["0", "3", "3", "1", "0"]
    doc = run_json(capsys, "lt", "torsion", "-p", "3", "-n", "2", "--deg", "9", "--prec", "4")
    assert doc["degree"] == doc["expected_degree"] == 6 and doc["eisenstein"]
    doc = run_json(capsys, "lt", "law", "-d", "1", "-p", "1+w", "--deg", "4", "--prec", "3")
    assert doc["ring"]["q"] == 2


def test_cm_commands(capsys):
    doc = run_json(capsys, "cm", "torsor", "-d", "5", "-f", "3")
    assert doc["certificate"]["pass"] and doc["certificate"]["size"] == 4
    doc = run_json(capsys, "cm", "ghost", "-d", "1", "--bound", "8")
    assert doc["pass"]
    doc = run_json(capsys, "cm", "torsion", "-d", "1", "-f", "3")
    assert doc["size"] == 9


def test_tannaka_command(capsys):
    doc = run_json(capsys, "tannaka", "verify", "-d", "5", "--bound", "15")
    assert doc["pass"] and doc["cocycle"]["failures"] == []
    doc = run_json(capsys, "tannaka", "verify", "-d", "1", "-f", "3", "-g", "6", "--bound", "15")
    assert doc["pass"]


def test_environment_and_flags(capsys, monkeypatch):
    monkeypatch.setenv("CMLL_BITS", "20")
    assert run(capsys, "cm", "hilbert", "-d", "1")[0] == 3
    # flags override the environment
    assert run(capsys, "cm", "hilbert", "-d", "1", "--bits", "128")[0] == 0
    monkeypatch.setenv("CMLL_BITS", "lots")
    assert run(capsys, "cm", "hilbert", "-d", "1")[0] == 3


def test_pretty_and_out(capsys, tmp_path):
    target = tmp_path / "order.json"
    code, out, _ = run(capsys, "rayclass", "order", "-d", "1", "-f", "3", "--pretty", "--out", str(target))
    assert code == 0 and out.startswith("{\n  ")
    assert json.loads(target.read_text()) == json.loads(out)


@pytest.mark.parametrize("argv", [
    ["cm", "torsor", "-d", "5", "-f", "3"],
    ["tannaka", "verify", "-d", "5", "--bound", "10"],
    ["lambda", "verify", "--carrier", "okt", "-d", "1", "--bound", "6", "--samples", "3"],
])
def test_deterministic_output(capsys, argv):
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second


def test_console_module():
    proc = subprocess.run([sys.executable, "-m", "cmll", "rayclass", "order", "-d", "1", "-f", "3"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["order"] == 2
