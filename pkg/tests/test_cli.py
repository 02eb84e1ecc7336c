import json
import subprocess
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

from ultrapencil.cli import main

PENCIL = {
    "p": 5,
    "A": {"rows": [["1/1", "0/1"], ["0/1", "2/1"]]},
    "B": {"rows": [["1/1", "0/1"], ["0/1", "1/1"]]},
}

TAIL = {
    "p": 5,
    "prefix_a": ["1/1", "2/1"],
    "prefix_b": ["1/1", "1/1"],
    "tail_a": {"kind": "const", "c": "3/1"},
    "tail_b": {"kind": "const", "c": "1/1"},
}


@pytest.fixture
def pencil_file(tmp_path):
    path = tmp_path / "pencil.json"
    path.write_text(json.dumps(PENCIL))
    return str(path)


@pytest.fixture
def tail_file(tmp_path):
    path = tmp_path / "tail.json"
    path.write_text(json.dumps(TAIL))
    return str(path)


def run_main(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify(pencil_file, capsys):
    code, out, _ = run_main(
        ["classify", "--input", pencil_file, "--lambda", "1,6", "--eps", "1/2"],
        capsys,
    )
    assert code == 0
    records = [json.loads(line) for line in out.strip().splitlines()]
    by_lam = {r["lambda"]: r for r in records}
    assert by_lam["1/1"]["in_spectrum"] is True
    assert by_lam["6/1"]["in_spectrum"] is False
    assert by_lam["6/1"]["in_cond_pseudo"] is True
    assert by_lam["6/1"]["kappa"] == {"value": {"kind": "ppow", "v": -1}}


def test_classify_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run_main(
        ["classify", "--input", str(bad), "--lambda", "1"], capsys
    )
    assert code == 2


def test_classify_dimension_mismatch(tmp_path, capsys):
    obj = {
        "p": 5,
        "A": {"rows": [["1/1"]]},
        "B": {"rows": [["1/1", "0/1"], ["0/1", "1/1"]]},
    }
    path = tmp_path / "mismatch.json"
    path.write_text(json.dumps(obj))
    code, _, _ = run_main(["classify", "--input", str(path), "--lambda", "1"], capsys)
    assert code == 2


def test_region_with_heatmap(pencil_file, tmp_path, capsys):
    out_dir = tmp_path / "out"
    code, _, _ = run_main(
        [
            "region",
            "--input",
            pencil_file,
            "--eps",
            "1/5",
            "--grid=-1:3:2",
            "--seed",
            "7",
            "--pgm",
            "--out",
            str(out_dir),
        ],
        capsys,
    )
    assert code == 0
    region = json.loads((out_dir / "region.json").read_text())["1/5"]
    assert sorted(b["radius_v"] for b in region["balls"]) == [2, 2]
    csv = (out_dir / "heatmap.csv").read_text().splitlines()
    assert csv[0] == "lambda,kappa_exponent"
    assert len(csv) > 1
    pgm = (out_dir / "heatmap.pgm").read_text()
    assert pgm.startswith("P2 ")


def test_region_rejects_non_diagonal(tmp_path, capsys):
    obj = {
        "p": 5,
        "A": {"rows": [["1/1", "1/1"], ["0/1", "2/1"]]},
        "B": {"rows": [["1/1", "0/1"], ["0/1", "1/1"]]},
    }
    path = tmp_path / "dense.json"
    path.write_text(json.dumps(obj))
    code, _, _ = run_main(["region", "--input", str(path), "--eps", "1/5"], capsys)
    assert code == 2


def test_perturb_certificate(pencil_file, capsys):
    code, out, _ = run_main(
        ["perturb", "--input", pencil_file, "--lambda", "6", "--eps", "1"],
        capsys,
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["C"]["rows"] == [["5/1", "0/1"], ["0/1", "0/1"]]
    assert obj["singular"] is True


def test_perturb_spectral_point_uses_zero(pencil_file, capsys):
    code, out, _ = run_main(
        ["perturb", "--input", pencil_file, "--lambda", "1", "--eps", "1"],
        capsys,
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["C"]["rows"] == [["0/1", "0/1"], ["0/1", "0/1"]]


def test_perturb_exit_3_outside(pencil_file, capsys):
    code, _, err = run_main(
        ["perturb", "--input", pencil_file, "--lambda", "6", "--eps", "1/10"],
        capsys,
    )
    assert code == 3
    assert "kappa" in err


def test_essential(tail_file, capsys):
    code, out, _ = run_main(
        ["essential", "--input", tail_file, "--lambda", "1,0"], capsys
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["essential_spectrum"] == ["3/1"]
    by_lam = {r["lambda"]: r for r in obj["probes"]}
    assert by_lam["1/1"]["spectral"] and not by_lam["1/1"]["essential"]
    assert by_lam["1/1"]["regularized_spectral"] is False
    assert by_lam["3/1"]["essential"]
    assert not by_lam["0/1"]["spectral"]


def test_essential_unsupported_tails(tmp_path, capsys):
    obj = dict(TAIL)
    obj["tail_b"] = {"kind": "geom", "c": "1/1", "step_v": 1}
    path = tmp_path / "geo.json"
    path.write_text(json.dumps(obj))
    code, _, _ = run_main(["essential", "--input", str(path)], capsys)
    assert code == 2


def test_check_theorems_small_run(tmp_path, capsys):
    out_dir = tmp_path / "rep"
    code, _, err = run_main(
        [
            "check-theorems",
            "--seed",
            "1",
            "--trials",
            "6",
            "--out",
            str(out_dir),
        ],
        capsys,
    )
    assert code == 0, err
    report = json.loads((out_dir / "report.json").read_text())
    assert report["ok"] and report["failures"] == 0
    assert "PASS" in err


def test_check_theorems_deterministic(tmp_path, capsys):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        code, _, _ = run_main(
            ["check-theorems", "--seed", "3", "--trials", "3", "--out", str(d)],
            capsys,
        )
        assert code == 0
    assert (dirs[0] / "report.json").read_bytes() == (
        dirs[1] / "report.json"
    ).read_bytes()


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ultrapencil.cli", "--help"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "classify" in proc.stdout
