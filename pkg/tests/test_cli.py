import csv
import json
import re
import subprocess
import sys

import numpy as np
import pytest

from radmean.cli import main

from conftest import DATA

T1, Q1, SQUARE, COLLINEAR = (str(DATA / f) for f in ("t1.json", "q1.json", "square.json", "collinear-points.json"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", T1, "--p", "-0.5", "--x=-0.7071067811865476,0.7071067811865476")
    assert code == 0
    assert float(out) == pytest.approx(np.sqrt(2) / 36, rel=1e-14)
    assert len(out.strip().replace("0.", "", 1).lstrip("0")) == 15


def test_eval_radial(capsys):
    code, out, _ = run(capsys, "eval", T1, "--p", "-0.5", "--x=1,0", "--normalization", "radial")
    assert code == 0 and float(out) > 0


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", Q1, "--x=-1,1")
    d = json.loads(out)
    assert code == 0 and d["alpha"] == pytest.approx([6, -4])
    assert d["parallelogram_areas"] == pytest.approx([6, 4])


def test_boundary_csv_and_svg(capsys, tmp_path):
    code, out, err = run(capsys, "boundary", T1, "--p", "-0.5", "--samples", "16")
    rows = list(csv.reader(out.splitlines()))
    assert code == 0 and rows[0] == ["angle", "x", "y"] and len(rows) == 1 + 16 + 6
    assert "# run: samples=16" in err
    code, _, _ = run(capsys, "boundary", T1, "--p", "-0.5", "--format", "svg", "--out-dir", str(tmp_path))
    assert code == 0 and (tmp_path / "boundary.svg").read_text().startswith("<svg")


def test_certify_square(capsys, tmp_path):
    code, _, _ = run(capsys, "certify", SQUARE, "--p", "-0.5", "--out-dir", str(tmp_path))
    cert = json.loads((tmp_path / "certificate.json").read_text())
    assert code == 0 and cert["verdict"] == "pass" and cert["perturbation_applied"] == 1e-6


def test_certify_invalid_p(capsys):
    code, _, err = run(capsys, "certify", Q1, "--p", "-1.5")
    assert code == 1 and "p must lie in (-1,0)" in err


def test_certify_collinear(capsys):
    code, _, err = run(capsys, "certify", COLLINEAR, "--p", "-0.5")
    assert code == 1 and "DegenerateInput" in err


def test_missing_file_and_bad_usage(capsys, tmp_path):
    assert run(capsys, "eval", str(tmp_path / "nope.json"), "--p", "-0.5", "--x=1,0")[0] == 1
    assert run(capsys, "eval", T1, "--p", "-0.5", "--x=1")[0] == 1
    assert run(capsys, "eval", T1)[0] == 1
    assert run(capsys, "frobnicate")[0] == 1


def test_oracle_compare(capsys):
    for poly in (T1, Q1, str(DATA / "pentagon.json")):
        code, out, _ = run(capsys, "oracle-compare", poly, "--p", "-0.5", "--directions", "24", "--mc-samples", "0")
        rows = list(csv.DictReader(out.splitlines()))
        assert code == 0 and len(rows) == 24
        gap = max(abs(float(r["closed_form"]) - float(r["xray_exact"])) / float(r["xray_exact"]) for r in rows)
        assert gap <= 1e-10


def test_approx_converge(capsys):
    code, out, err = run(capsys, "approx-converge", "--p", "-0.5", "--m-list", "8,16,32,64")
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and [int(r["m"]) for r in rows] == [8, 16, 32, 64]
    assert "non-increasing within 10%: True" in err


def test_matrix_norm(capsys):
    code, out, err = run(capsys, "experiment-matrix-norm", "--p", "0.5", "--grid", "0.1,3,6")
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and len(rows) == 36
    assert min(float(r["min_eig"]) for r in rows) >= -1e-6
    assert "|det|^(1/2)=2" in err
    assert run(capsys, "experiment-matrix-norm", "--p", "0.5", "--grid", "1,2")[0] == 1


def test_render(capsys, tmp_path):
    code, _, _ = run(capsys, "render", T1, "--p", "-0.5", "--samples", "256", "--out-dir", str(tmp_path))
    svg = (tmp_path / "render.svg").read_text()
    rows = list(csv.reader((tmp_path / "render.csv").read_text().splitlines()))
    assert code == 0
    assert len(re.findall(r"<path ", svg)) == 2
    assert rows[0] == ["angle", "bx", "by", "norm_value"] and len(rows) == 1 + 256 + 6
    assert run(capsys, "render", T1, "--p", "-0.5", "--samples", "0", "--out-dir", str(tmp_path))[0] == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "radmean", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()
