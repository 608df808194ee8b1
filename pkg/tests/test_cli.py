import json
import subprocess
import sys

import pytest

from rankspectra.cli import main


def err_json(capsys):
    line = capsys.readouterr().err.strip()
    assert "\n" not in line
    return json.loads(line)


def test_simulate_theory_compare(tmp_path, capsys):
    assert main(["simulate", "--n", "200", "--p", "100", "--estimator", "spearman", "--out", str(tmp_path / "sim")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["eigenvalues"] == 1000
    assert main(["theory", "--n", "200", "--p", "100", "--out", str(tmp_path / "law.csv")]) == 0
    capsys.readouterr()
    rc = main(["compare", str(tmp_path / "sim/eigenvalues.csv"), str(tmp_path / "law.csv"), "--threshold", "0.05", "--out", str(tmp_path / "r.json")])
    assert rc == 0
    assert json.loads((tmp_path / "r.json").read_text())["levy"] < 0.05
    rc = main(["compare", str(tmp_path / "sim/eigenvalues.csv"), str(tmp_path / "law.csv"), "--threshold", "1e-9"])
    assert rc == 1


def test_config_file_with_overrides(tmp_path, capsys):
    cfg = {"n": 50, "p": 20, "model": {"kind": "tridiagonal", "rho": 0.3}, "estimator": "kendall", "replications": 2}
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    assert main(["simulate", "--config", str(tmp_path / "c.json"), "--replications", "3", "--out", str(tmp_path / "o")]) == 0
    echoed = json.loads((tmp_path / "o/config.json").read_text())
    assert echoed["replications"] == 3 and echoed["model"]["rho"] == 0.3


@pytest.mark.parametrize(
    "argv, code",
    [
        (["theory", "--n", "100", "--p", "50", "--estimator", "kendall", "--model", "tridiagonal", "--rho", "0.3", "--out", "x.csv"], "UnsupportedLaw"),
        (["simulate", "--n", "100", "--p", "50", "--model", "tridiagonal", "--rho", "0.5", "--out", "o"], "InvalidRho"),
        (["compare", "missing.csv", "missing2.csv"], "ParseError"),
        (["simulate", "--p", "5", "--out", "o"], "UsageError"),
        (["frobnicate"], "UsageError"),
    ],
)
def test_error_paths(argv, code, tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 2
    e = err_json(capsys)
    assert e["error"] == code and e["message"]


def test_verify_subcommand(capsys):
    assert main(["verify", "--suite", "grothendieck", "--mc-samples", "100000"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3 and all(line.startswith("PASS") for line in lines)


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "rankspectra", "compare", "nope.csv", "nope.csv"], capture_output=True, text=True, cwd=tmp_path)
    assert r.returncode == 2
    assert json.loads(r.stderr)["error"] == "ParseError"
