import json
import math

import numpy as np
import pytest

from steklov_extremal import io
from steklov_extremal.cli import run


def test_solve_constant(tmp_path, capsys):
    rc = run(["solve", "--density", '{"kind": "constant", "alpha": 0.5}', "--k", "4", "--out", str(tmp_path)])
    assert rc == 0
    data = json.loads((tmp_path / "eigenvalues.json").read_text())
    assert np.allclose(data["eigenvalues"], [2, 2, 4, 4], rtol=1e-8)
    assert data["artifact_version"] and data["arguments"]["k"] == 4
    assert data["hps"]["passed"]
    header, arr = io.read_csv(tmp_path / "traces.csv")
    assert arr.shape == (256, len(header))
    assert "2 2 4 4" in capsys.readouterr().out


def test_solve_from_csv_density(tmp_path):
    theta = 2 * np.pi * np.arange(128) / 128
    io.write_csv(tmp_path / "rho.csv", ["theta", "rho"], [theta, 0.5 + 0.2 * np.cos(2 * theta)])
    out = tmp_path / "o"
    rc = run(["solve", "--density", str(tmp_path / "rho.csv"), "--nodes", "128", "--k", "2", "--out", str(out)])
    assert rc == 0


def test_solve_fourier_curve(tmp_path):
    curve = '{"kind": "fourier", "cos": [0.0, 0.1], "sin": []}'
    rc = run(["solve", "--curve", curve, "--density", '{"kind": "constant", "alpha": 0.5}',
              "--nodes", "128", "--k", "3", "--out", str(tmp_path)])
    assert rc == 0


@pytest.mark.parametrize(
    "density",
    ['{"kind": "bogus"}', '{"kind": "constant", "alpha": 1.5}', "not json", "missing.csv"],
)
def test_config_errors_exit_2(tmp_path, density, capsys):
    assert run(["solve", "--density", density, "--out", str(tmp_path)]) == 2
    assert capsys.readouterr().err


def test_homogenize_bad_list(tmp_path):
    assert run(["homogenize", "--alpha", "0.5", "--narcs", "2,x", "--out", str(tmp_path)]) == 2
    assert run(["homogenize", "--alpha", "0.5", "--narcs", "4,2", "--out", str(tmp_path)]) == 2


def test_solver_failure_exit_3(tmp_path):
    # k beyond the resolvable spectrum of a tiny discretization
    assert run(["solve", "--density", '{"kind": "constant", "alpha": 0.5}', "--nodes", "16", "--k", "40",
                "--out", str(tmp_path)]) == 3


def test_homogenize(tmp_path):
    rc = run(["homogenize", "--alpha", "0.5", "--narcs", "2,4", "--out", str(tmp_path)])
    assert rc == 0
    header, arr = io.read_csv(tmp_path / "sweep.csv")
    assert header == ["n_arcs", "n_nodes", "eigenvalue", "limit"]
    assert arr[0, 2] == pytest.approx(1.1517, abs=2e-3)
    assert json.loads((tmp_path / "manifest.json").read_text())["command"] == "homogenize"


def test_perturb(capsys):
    assert run(["perturb", "--alpha", "0.5", "--j", "1"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["fd_rel_error"] <= 1e-4
    assert sorted(data["analytic_slopes"]) == pytest.approx(sorted(data["gateaux_slopes"]), abs=1e-6)
    assert run(["perturb", "--alpha", "0.5", "--j", "0"]) == 2


def test_appendix_and_report(tmp_path, capsys):
    assert run(["appendix", "--out", str(tmp_path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["passed"] and out["margin"] > 1e-4
    header, arr = io.read_csv(tmp_path / "lambda2.csv")
    assert arr.shape == (101, 3)
    assert run(["report", "--in", str(tmp_path)]) == 0
    assert "margin" in capsys.readouterr().out


def test_optimize_and_report(tmp_path, capsys):
    rc = run(["optimize", "--alpha", "0.5", "--k", "1", "--direction", "min", "--seeds", "2",
              "--nodes", "128", "--out", str(tmp_path)])
    assert rc == 0
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["objective"] == pytest.approx(1.1517, abs=1e-2)
    assert len(man["runs"]) == 2 and "settings" in man
    assert json.loads((tmp_path / "optimality.json").read_text())["passed"]
    header, arr = io.read_csv(tmp_path / "density.csv")
    assert header == ["theta", "rho"]
    assert np.sum(arr[:, 1]) * 2 * math.pi / 128 == pytest.approx(math.pi, rel=1e-10)
    capsys.readouterr()
    assert run(["report", "--in", str(tmp_path)]) == 0
    text = capsys.readouterr().out
    assert "ratio=" in text and "passed=True" in text


def test_report_missing(tmp_path):
    assert run(["report", "--in", str(tmp_path / "nope")]) == 2
    assert run(["report", "--in", str(tmp_path)]) == 2


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "steklov_extremal", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()
