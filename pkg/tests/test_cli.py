import csv
import io
import json
import subprocess
import sys

import pytest

from selbergconst.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_constant_json(capsys):
    code, out, _ = run(capsys, "constant", "I_prod", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["lo"] <= 1.943596436820759 <= data["hi"] and data["id"] == "I_prod"
    assert set(data["run"]) == {"version", "inputs_sha256", "config", "timestamp"}


def test_sigma_small(capsys):
    code, out, _ = run(capsys, "sigma", "--U", "2", "--v", "1")
    assert code == 0
    data = json.loads(out)
    assert data["lo"] <= 0.4804530139182014 <= data["hi"]


def test_sum_csv(capsys):
    code, out, _ = run(capsys, "sum", "inv_phi", "--X", "5", "--q", "2")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert float(rows[0]["lo"]) <= 1.75 <= float(rows[0]["hi"])


def test_scan_blocks(capsys):
    code, out, _ = run(capsys, "scan", "sq_half", "--range", "10:1000", "--blocks", "3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 3 and rows[0]["X_from"] == "10.0"


def test_hq_eval(capsys):
    code, out, _ = run(capsys, "hq", "eval", "--s", "1")
    assert code == 0
    data = json.loads(out)
    assert data["lo"] <= 1.6449340668482264 <= data["hi"]


def test_exit_codes(capsys):
    assert run(capsys, "bt", "--Y", "1e24")[0] == 2
    assert run(capsys, "constant", "no_such_constant")[0] == 2
    assert run(capsys, "pipeline", "--v", "2", "--c", "100")[0] == 2
    assert run(capsys, "hq", "integral", "--X", "1e9")[0] == 3
    assert run(capsys, "sigma", "--U", "5000", "--method", "pairwise")[0] == 3
    assert run(capsys, "frobnicate")[0] == 64
    assert run(capsys, "sigma", "--U", "ten")[0] == 64
    assert run(capsys, "hq", "eval", "--threads", "0")[0] == 64


def test_deterministic_modulo_timestamp(capsys):
    outs = []
    for _ in range(2):
        code, out, _ = run(capsys, "pipeline", "--v", "1", "--regime", "1e7", "--c", "10", "--json")
        assert code == 0
        data = json.loads(out)
        data["run"].pop("timestamp")
        outs.append(data)
    assert outs[0] == outs[1]
    assert outs[0]["entries"]["Merge_log"]["lo"] > 0


def test_verify_quick(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "quick")
    assert code == 0
    assert out.strip().endswith("rows pass")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "selbergconst.cli", "constant", "twin_inverse"],
                         capture_output=True, text=True, timeout=300)
    assert res.returncode == 0, res.stderr
    assert json.loads(res.stdout)["id"] == "twin_inverse"


@pytest.mark.slow
def test_verify_desk(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "desk")
    assert code == 0, out
