import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from cbsolve.cbx import parse_cbx, read_cbx, save_cbx
from cbsolve.cli import BENCH_HEADER, main
from cbsolve.cyclic import CyclicBlockTri

from conftest import rel_inf


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def cbps_file(tmp_path):
    path = tmp_path / "sys.cbx"
    code, _ = run("gen", "--kind", "cbps", "--n", "8", "--m", "2", "--seed", "1", "--output", str(path))
    assert code == 0
    return path


def test_pipeline(cbps_file):
    code, text = run("solve", "--input", str(cbps_file))
    assert code == 0
    assert "residual_inf" in text and "matmuls" in text
    code, text = run("verify", "--input", str(cbps_file))
    assert code == 0, text
    assert "PASS" in text and "dense_deviation" in text


def test_dense_and_woodbury_agree(cbps_file, tmp_path):
    wood, dense = tmp_path / "w.cbx", tmp_path / "d.cbx"
    assert run("solve", "--input", str(cbps_file), "--output", str(wood))[0] == 0
    assert run("solve", "--input", str(cbps_file), "--output", str(dense), "--method", "dense")[0] == 0
    assert rel_inf(read_cbx(wood).solution, read_cbx(dense).solution) <= 1e-8


def test_params_flags(cbps_file, tmp_path):
    out = tmp_path / "p.cbx"
    args = ["--alpha", "2", "--beta", "0.5", "--gamma", "3", "--delta", "0.25"]
    assert run("solve", "--input", str(cbps_file), "--output", str(out), *args)[0] == 0
    assert run("verify", "--input", str(out))[0] == 0


def test_zero_param_is_usage_error(cbps_file):
    assert run("solve", "--input", str(cbps_file), "--alpha", "0")[0] == 64


def test_corrupted_solution(cbps_file):
    run("solve", "--input", str(cbps_file))
    doc = read_cbx(cbps_file)
    sol = doc.solution.copy()
    sol[3, 1] += 0.5
    save_cbx(cbps_file, doc.operator, doc.rhs, sol)
    code, text = run("verify", "--input", str(cbps_file))
    assert code != 0 and "FAIL" in text


def test_verify_needs_sol(cbps_file):
    assert run("verify", "--input", str(cbps_file))[0] == 1


def test_deterministic_output(cbps_file, tmp_path):
    a, b = tmp_path / "a.cbx", tmp_path / "b.cbx"
    r1 = run("solve", "--input", str(cbps_file), "--output", str(a))
    r2 = run("solve", "--input", str(cbps_file), "--output", str(b))
    assert r1 == r2
    assert a.read_bytes() == b.read_bytes()


def test_unknown_flag():
    assert run("solve", "--bogus")[0] == 64
    assert run("frobnicate")[0] == 64
    assert run()[0] == 64


def test_format_error(tmp_path):
    bad = tmp_path / "bad.cbx"
    bad.write_text("CBX2 cbts 3 1\n")
    assert run("solve", "--input", str(bad))[0] == 1
    assert run("solve", "--input", str(tmp_path / "missing.cbx"))[0] == 1


def test_missing_rhs(tmp_path):
    path = tmp_path / "norhs.cbx"
    path.write_text("CBX1 cbts 3 1\n0 1 0 0 1 0 0 1 0\n")
    assert run("solve", "--input", str(path))[0] == 1


def test_singular_pivot_exit(tmp_path):
    z = np.zeros((4, 1, 1))
    b = np.ones((4, 1, 1))
    b[0] = 0.0
    path = tmp_path / "s.cbx"
    save_cbx(path, CyclicBlockTri(z, b, z), np.ones((4, 1)))
    code, _ = run("solve", "--input", str(path))
    assert code == 2


def test_singular_capacitance_exit(tmp_path):
    band = np.full((3, 1, 1), -2.0)
    path = tmp_path / "cap.cbx"
    save_cbx(path, CyclicBlockTri(band, np.full((3, 1, 1), 4.0), band), np.ones((3, 1)))
    assert run("solve", "--input", str(path))[0] == 2


@pytest.mark.parametrize("kind", ["tri", "penta"])
def test_non_cyclic_kinds(kind, tmp_path):
    path = tmp_path / "nc.cbx"
    assert run("gen", "--kind", kind, "--n", "6", "--m", "2", "--seed", "4", "--output", str(path))[0] == 0
    assert run("solve", "--input", str(path))[0] == 0
    assert run("verify", "--input", str(path))[0] == 0


def test_bench_csv():
    code, text = run("bench", "--kind", "cbts", "--m", "2", "--n-list", "5,10", "--repeat", "2")
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == BENCH_HEADER
    assert [(r[0], r[2]) for r in rows[1:]] == [
        ("5", "woodbury"), ("5", "dense"), ("10", "woodbury"), ("10", "dense"),
    ]
    assert int(rows[1][4]) > 0 and float(rows[1][3]) >= 0


def test_bench_skips_dense_when_large():
    code, text = run("bench", "--kind", "cbts", "--m", "1", "--n-list", "601")
    assert code == 0
    assert [r[2] for r in list(csv.reader(io.StringIO(text)))[1:]] == ["woodbury"]


def test_bench_bad_list():
    assert run("bench", "--kind", "cbts", "--m", "1", "--n-list", "a,b")[0] == 64


def test_module_entry_point(tmp_path):
    path = tmp_path / "m.cbx"
    proc = subprocess.run(
        [sys.executable, "-m", "cbsolve", "gen", "--kind", "cbts", "--n", "5", "--m", "1",
         "--seed", "0", "--output", str(path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert parse_cbx(path.read_text()).operator.n == 5
    proc = subprocess.run([sys.executable, "-m", "cbsolve", "--nope"], capture_output=True)
    assert proc.returncode == 64
