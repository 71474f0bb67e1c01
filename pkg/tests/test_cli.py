import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from hypwp import cli
from hypwp.acceptance import compare_trees
from hypwp.errors import NumericalError

SPECS = Path(__file__).resolve().parent.parent / "specs"


def run(*args):
    return cli.main([str(a) for a in args])


def test_analyze_gevrey_example(tmp_path, capsys):
    assert run("analyze", "--spec", SPECS / "gevrey_power.json", "--out", tmp_path) == 0
    res = json.loads((tmp_path / "classification.json").read_text())
    assert res["verdict"] == "GlobalWellPosed"
    assert "GlobalWellPosed" in capsys.readouterr().out


def test_analyze_log_squared_example_is_local(tmp_path):
    assert run("analyze", "--spec", SPECS / "log_squared.json", "--out", tmp_path) == 0
    assert json.loads((tmp_path / "classification.json").read_text())["verdict"] == "LocalWellPosed"


def test_weights_eight_rows(tmp_path):
    assert run("weights", "--spec", SPECS / "lipschitz_gevrey.json", "--out", tmp_path, "--xi-points", 8) == 0
    rows = list(csv.reader((tmp_path / "weights.csv").open()))
    assert rows[0] == ["xi", "t_xi", "w", "W", "M"]
    assert len(rows) == 9
    # every value printed with 17 significant digits
    assert all(c == format(float(c), ".17g") for row in rows[1:] for c in row)


def test_verify_small_s_names_decay_condition(tmp_path, capsys):
    assert run("verify", "--spec", SPECS / "small_s.json", "--out", tmp_path) == 1
    rep = json.loads((tmp_path / "verify.json").read_text())
    assert "decay_condition" in rep["failing"]
    assert "FAIL decay_condition" in capsys.readouterr().out


def test_verify_gevrey_example_passes(tmp_path):
    assert run("verify", "--spec", SPECS / "gevrey_power.json", "--out", tmp_path) == 0


def test_fit_log_corrected_example(tmp_path):
    assert run("fit", "--spec", SPECS / "log_corrected.json", "--out", tmp_path, "--xi-min", 1e4, "--xi-max", 1e9) == 0
    rep = json.loads((tmp_path / "fit.json").read_text())
    assert rep["reference"] == "log_corrected"


def test_simulate_writes_loss_files(tmp_path):
    assert run("simulate", "--spec", SPECS / "sharp_gevrey.json", "--out", tmp_path, "--xi-max", 1e3, "--xi-points", 8) == 0
    summary = json.loads((tmp_path / "loss.json").read_text())
    assert summary["convergence"]["pass"]
    assert len((tmp_path / "loss.csv").read_text().splitlines()) == 9


def test_simulate_without_model_is_input_error(tmp_path, capsys):
    assert run("simulate", "--spec", SPECS / "gevrey_power.json", "--out", tmp_path) == 2
    assert "model" in capsys.readouterr().err


@pytest.mark.parametrize("flags,needle", [
    (["--xi-points", "4"], "xi_points"),
    (["--xi-min", "1"], "xi_min"),
    (["--tol", "1e-2"], "tol"),
    (["--xi-min", "1e5", "--xi-max", "1e4"], "xi_max"),
])
def test_config_invariants(tmp_path, capsys, flags, needle):
    assert run("weights", "--spec", SPECS / "gevrey_power.json", "--out", tmp_path, *flags) == 2
    assert needle in capsys.readouterr().err


def test_malformed_json_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "shape": {"kind": "monomial", "l": 4},\n  "levi_weight": {"m": 2, "s": }\n}\n')
    assert run("analyze", "--spec", bad, "--out", tmp_path / "o") == 2
    assert "line 3" in capsys.readouterr().err


def test_bad_field_reports_field_and_line(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "shape": {"kind": "monomial", "l": 4},\n  "levi_weight": {"m": 2, "s": "three"}\n}\n')
    assert run("analyze", "--spec", bad, "--out", tmp_path / "o") == 2
    err = capsys.readouterr().err
    assert "levi_weight.s" in err and "line 3" in err


def test_missing_spec_file(tmp_path):
    assert run("analyze", "--spec", tmp_path / "nope.json", "--out", tmp_path) == 2


def test_unknown_command(tmp_path):
    assert run("explode", "--spec", SPECS / "gevrey_power.json", "--out", tmp_path) == 2


def test_numerical_failure_exit_code(tmp_path, monkeypatch, capsys):
    def boom(*a, **k):
        raise NumericalError("integrator step size underflow")

    monkeypatch.setattr("hypwp.spectral.measure_loss", boom)
    assert run("simulate", "--spec", SPECS / "sharp_gevrey.json", "--out", tmp_path) == 3
    assert "simulate" in capsys.readouterr().err


def test_weights_independent_of_workers(tmp_path):
    for w in (1, 8):
        assert run("weights", "--spec", SPECS / "log_corrected.json", "--out", tmp_path / str(w), "--workers", w) == 0
    assert compare_trees(tmp_path / "1", tmp_path / "8") == []


def test_simulate_independent_of_workers(tmp_path):
    for w in (1, 3):
        assert run("simulate", "--spec", SPECS / "levi_saturating.json", "--out", tmp_path / str(w),
                   "--xi-max", 400, "--xi-points", 8, "--workers", w) == 0
    assert compare_trees(tmp_path / "1", tmp_path / "3") == []


def test_module_entry_point(tmp_path):
    p = subprocess.run([sys.executable, "-m", "hypwp", "weights", "--spec", str(SPECS / "gevrey_power.json"),
                        "--out", str(tmp_path), "--xi-points", "8"], capture_output=True, text=True)
    assert p.returncode == 0, p.stderr
    assert (tmp_path / "weights.csv").exists()
