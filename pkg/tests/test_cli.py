import csv
import json
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsk.cli import UsageError, parse_complex, run


def _report(capsys):
    return json.loads(capsys.readouterr().out)


@given(re=st.floats(-1e3, 1e3), im=st.floats(-1e3, 1e3))
def test_parse_complex_forms(re, im):
    assert parse_complex([re, im]) == complex(re, im)
    assert parse_complex(repr(complex(re, im)).strip("()").replace("j", "i")) == pytest.approx(complex(re, im))


def test_parse_complex_rejects_garbage():
    with pytest.raises((UsageError, ValueError)):
        parse_complex("one plus i")


def test_chern(tmp_path, capsys):
    assert run(["chern", "--k", "4", "--out", str(tmp_path)]) == 0
    rep = _report(capsys)
    assert rep["schema"] == "hsk/1" and rep["command"] == "chern"
    assert rep["result"]["ch_V"] == "4 − 2t̂"
    assert rep["result"]["index_c1"] == -4
    on_disk = json.loads((tmp_path / "chern.json").read_text(encoding="utf-8"))
    assert on_disk == rep
    rows = list(csv.reader((tmp_path / "chern.csv").open(encoding="utf-8")))
    assert rows[0] == ["scenario", "monomial", "coefficient"]


def test_curve(tmp_path, capsys):
    assert run(["curve", "--k", "2", "--seed", "7", "--out", str(tmp_path)]) == 0
    rep = _report(capsys)
    assert rep["result"]["genus"] == 3
    assert all(i["passed"] for i in rep["invariants"])
    assert (tmp_path / "branch.csv").exists()


def test_ratmap(tmp_path, capsys):
    assert run(["ratmap", "--k", "1", "--seed", "7", "--out", str(tmp_path)]) == 0
    rep = _report(capsys)
    assert all(i["passed"] for i in rep["invariants"])
    assert (tmp_path / "coefficients.csv").exists() and (tmp_path / "samples.csv").exists()


def test_config_file_with_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"k": 2, "tau": [0.0, 2.0], "xi0": "0.3+0.4i"}))
    assert run(["chern", "--config", str(cfg), "--k", "6"]) == 0
    rep = _report(capsys)
    assert rep["config"]["k"] == 6
    assert rep["result"]["ch_E_check"] == "2 − 6 t·p"


def test_unknown_config_key_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"k": 2, "colour": "red"}))
    assert run(["chern", "--config", str(cfg)]) == 2


@pytest.mark.parametrize("argv", [
    ["curve", "--k", "0"],
    ["curve", "--tau", "0-1i"],
    ["nonsense"],
    [],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == 2


def test_domain_error_gives_diagnostics(capsys):
    assert run(["flatmodel", "--xi", "0,0"]) == 1
    rep = _report(capsys)
    assert rep["error"] == "InvertibilityError"


def test_order_two_pole_is_rejected_with_diagnostics(capsys):
    assert run(["curve", "--xi0", "0.5"]) == 1
    assert "order two" in _report(capsys)["message"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "hsk", "chern", "--k", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["ch_V"] == "2 − 2t̂"
    assert "ch_V(k=2)" in proc.stderr
