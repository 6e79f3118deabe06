import csv
import io
import json
import os
import stat
import subprocess
import sys

import pytest

from carleson_lab import cli


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_geometry(capsys):
    code, out, _ = run(capsys, "geometry", "--a", "0.5", "--z", "0.5")
    d = json.loads(out)
    assert code == 0 and d["pseudo_hyperbolic"] == 0.0


def test_geometry_outside_ball(capsys):
    code, _, err = run(capsys, "geometry", "--a", "1.2", "--z", "0")
    assert code == 3 and "outside" in err


@pytest.mark.parametrize("theta,code", [("0", 0), ("-0.5", 1)])
def test_classify_exit_codes(capsys, theta, code):
    got, out, _ = run(capsys, "classify", "--measure", f"radial_power:{theta}", "--lambda", "1", "--gamma", "0")
    assert got == code
    assert json.loads(out)["verdict"] == ("carleson" if code == 0 else "not_carleson")


def test_classify_csv(capsys):
    code, out, _ = run(capsys, "classify", "--measure", "radial_power:0.5", "--lambda", "1", "--gamma", "0",
                       "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and list(rows[0]) == ["probe_id", "radius", "value", "slope", "verdict"]


def test_malformed_json_reports_position(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"measure": "zero",\n  "seed": }\n')
    code, _, err = run(capsys, "classify", "--config", str(bad))
    assert code == 3 and "line 2" in err and "column" in err


def test_unknown_config_key(capsys, tmp_path):
    cfgf = tmp_path / "c.json"
    cfgf.write_text(json.dumps({"measure": "zero", "colour": 1}))
    code, _, err = run(capsys, "classify", "--config", str(cfgf))
    assert code == 3 and "colour" in err


def test_config_for_other_command(capsys, tmp_path):
    cfgf = tmp_path / "c.json"
    cfgf.write_text(json.dumps({"command": "norm"}))
    code, _, _ = run(capsys, "classify", "--config", str(cfgf))
    assert code == 3


def test_config_file_drives_run(capsys, tmp_path):
    cfgf = tmp_path / "c.json"
    cfgf.write_text(json.dumps({"measure": {"type": "radial_power", "theta": 0.5},
                                "params": {"lambda": 1.0, "gamma": 0.0}, "options": {"route": "berezin"}}))
    code, out, _ = run(capsys, "classify", "--config", str(cfgf))
    assert code == 0 and json.loads(out)["route"] == "berezin"


def test_missing_params(capsys):
    code, _, err = run(capsys, "classify", "--measure", "zero")
    assert code == 3 and "lambda" in err


def test_usage_error_maps_to_input_code(capsys):
    code, _, _ = run(capsys, "classify", "--route", "nowhere")
    assert code == 3
    assert run(capsys, "frobnicate")[0] == 3


def test_hypothesis_violation(capsys):
    code, _, err = run(capsys, "toeplitz", "--measure", "radial_power:0", "--beta", "-0.9", "--p1", "0.5")
    assert code == 3 and "hypothesis" in err


def test_unknown_suite(capsys):
    assert run(capsys, "verify", "nonesuch")[0] == 3


def test_atomic_output(capsys, tmp_path):
    target = tmp_path / "out.json"
    target.write_text("old")
    code, out, _ = run(capsys, "geometry", "--a", "0.1", "--z", "0.2j", "--output", str(target))
    assert code == 0 and out == ""
    assert "bergman_distance" in json.loads(target.read_text())
    assert [p.name for p in tmp_path.iterdir()] == ["out.json"]
    umask = os.umask(0)
    os.umask(umask)
    assert stat.S_IMODE(target.stat().st_mode) == 0o666 & ~umask


def test_atomic_write_failure_leaves_target(tmp_path, monkeypatch):
    target = tmp_path / "keep.json"
    target.write_text("original")

    def boom(*a, **k):
        raise OSError("disk full")

    monkeypatch.setattr(cli.os, "replace", boom)
    with pytest.raises(OSError):
        cli.write_atomic(str(target), "new")
    assert target.read_text() == "original"
    assert [p.name for p in tmp_path.iterdir()] == ["keep.json"]


def test_symbol_parsing():
    assert cli.symbol_from_text("monomial:3").descriptor["k"] == 3
    with pytest.raises(cli.InputError):
        cli.symbol_from_text("sin")


def test_cesaro_value(capsys):
    code, out, _ = run(capsys, "cesaro", "--g", "z", "--f", "one", "--op", "J", "--z", "0.3+0.1j")
    d = json.loads(out)
    assert code == 0
    assert json.dumps(d)


def test_threads_do_not_change_output(capsys):
    args = ("norm", "--measure", "radial_power:0.5", "--lambda", "1", "--gamma", "0")
    a = run(capsys, *args, "--threads", "1")[1]
    b = run(capsys, *args, "--threads", "3")[1]
    assert a == b


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "carleson_lab.cli", "geometry", "--a", "0", "--z", "0.5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["bergman_distance"] == pytest.approx(0.5493061443340549)
