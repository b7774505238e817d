import csv
import io
import json
import subprocess
import sys
import time

import numpy as np
import pytest

from frametensor.algebras import AlgebraSpec, jaffard_norm
from frametensor.cli import main, parse_spec
from frametensor.frames import circulant_autocorrelation, decaying_window, shift_invariant_frame, gram_matrix
from frametensor.io import read_tensor


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def frames_dir(tmp_path, capsys):
    for name, extra in [
        ("ortho4", ["--kind", "orthonormal", "--size", 4]),
        ("ortho3", ["--kind", "orthonormal", "--size", 3]),
        ("shift8", ["--kind", "shift-invariant", "--size", 8, "--rate", 0.8]),
        ("shift6", ["--kind", "shift-invariant", "--size", 6, "--rate", 1.2]),
    ]:
        assert run(["gen-frame", *extra, "--out", tmp_path / f"{name}.json"], capsys)[0] == 0
    return tmp_path


def test_parse_spec_forms():
    assert parse_spec("jaffard:s=2").to_json() == AlgebraSpec.jaffard(2).to_json()
    assert parse_spec("schur:p=inf,delta=1").p == float("inf")
    assert parse_spec(json.dumps(AlgebraSpec.schur(2, 0.5).to_json())).to_json() == AlgebraSpec.schur(2, 0.5).to_json()
    assert parse_spec("sjostrand:kind=exponential-sub,b=1,gamma=0.5").family == "sjostrand"


def test_gram_orthonormal(frames_dir, capsys):
    code, out, _ = run(["gram", frames_dir / "ortho4.json", "--spec", "schur:p=1,delta=1"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["norm"] == 1.0
    assert rep["frame_bounds"] == [1.0, 1.0]
    assert rep["decay_profile"][0] == {"distance": 0.0, "max_abs": 1.0}


def test_gram_shift_invariant_closed_form(frames_dir, capsys):
    code, out, _ = run(["gram", frames_dir / "shift8.json", "--spec", "jaffard:s=1.5"], capsys)
    assert code == 0
    c = np.abs(circulant_autocorrelation(decaying_window(8, 0.8)))
    expected = max(c[(k - m) % 8] * (1 + abs(k - m)) ** 1.5 for m in range(8) for k in range(8))
    assert json.loads(out)["norm"] == pytest.approx(expected, rel=1e-12)


def test_gram_csv_profile(frames_dir, capsys):
    code, out, _ = run(["gram", frames_dir / "ortho3.json", "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["distance", "max_abs"] and len(rows) == 4


def test_gram_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    code, _, err = run(["gram", bad], capsys)
    assert code == 2 and "error" in err


def test_gram_missing_file(tmp_path, capsys):
    assert run(["gram", tmp_path / "nope.json"], capsys)[0] == 2


def test_bad_spec_is_usage_error(frames_dir, capsys):
    assert run(["gram", frames_dir / "ortho3.json", "--spec", "banach:s=1"], capsys)[0] == 2


def test_tensor_orthonormal(frames_dir, capsys):
    code, out, _ = run(["tensor", frames_dir / "ortho4.json", frames_dir / "ortho3.json"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert all(v == pytest.approx(1.0) for v in rep["computed"].values())
    assert all(v == pytest.approx(1.0) for v in rep["factorised"].values())
    assert all(v == 0.0 for v in rep["relative_difference"].values())


def test_tensor_two_weights(frames_dir, capsys):
    out_tensor = frames_dir / "G.json"
    code, out, _ = run(
        [
            "tensor", frames_dir / "shift8.json", frames_dir / "shift6.json",
            "--spec1", "jaffard:s=1", "--spec2", "jaffard:s=3", "--tensor-out", out_tensor,
        ],
        capsys,
    )
    rep = json.loads(out)
    assert code == 0
    assert np.isfinite(rep["computed"]["norm_a"])
    assert max(rep["relative_difference"].values()) <= 1e-10
    G = read_tensor(out_tensor)
    assert G.entries.shape == (8, 6, 6, 8)
    g1 = gram_matrix(shift_invariant_frame(8, 0.8))
    assert rep["factorised"]["norm_a1_tilde"] == pytest.approx(
        jaffard_norm(g1, 1) * np.linalg.norm(gram_matrix(shift_invariant_frame(6, 1.2)).entries, 2), rel=1e-10
    )


def test_tensor_missing_file(frames_dir, capsys):
    assert run(["tensor", frames_dir / "ortho4.json", frames_dir / "missing.json"], capsys)[0] == 2


def test_verify_deterministic_bytes(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["verify", "--seed", 7, "--trials", 3]
    assert run([*args, "--out", a], capsys)[0] == 0
    assert run([*args, "--out", b], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert rep["passed"] and rep["environment"]["seed"] == 7
    assert len(rep["checks"]) == 14


def test_verify_forced_failure(capsys):
    code, out, err = run(["verify", "--trials", 2, "--check", "contraction_oracle", "--tol", "contraction_oracle=0"], capsys)
    assert code == 1
    assert "FAILED" in err and "contraction_oracle" in err
    assert json.loads(out)["passed"] is False


def test_verify_usage_errors(capsys):
    assert run(["verify", "--tol", "nope=1"], capsys)[0] == 2
    assert run(["verify", "--tol", "reconstruction=-1"], capsys)[0] == 2
    assert run(["verify", "--trials", 0], capsys)[0] == 2
    assert run(["verify", "--check", "unknown"], capsys)[0] == 2


def test_verify_smoke_subprocess(tmp_path):
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "frametensor", "verify", "--trials", "1", "--format", "csv"],
        capture_output=True, text=True,
    )
    assert time.perf_counter() - start < 5.0
    assert proc.returncode == 0, proc.stderr
    rows = list(csv.DictReader(io.StringIO(proc.stdout)))
    assert len(rows) == 14 and all(r["passed"] == "True" for r in rows)


def test_argparse_error_exit_code():
    proc = subprocess.run([sys.executable, "-m", "frametensor", "frobnicate"], capture_output=True)
    assert proc.returncode == 2


def trend_rows(out):
    return list(csv.DictReader(io.StringIO(out)))


def test_inverse_trend_zero_perturbation(capsys):
    code, out, _ = run(["inverse-trend", "--perturbation", 0], capsys)
    rows = trend_rows(out)
    assert code == 0 and [r["size"] for r in rows] == ["2", "3", "4"]
    assert all(float(r["norm_a_inverse"]) == 1.0 for r in rows)


def test_inverse_trend_neumann_bound(capsys):
    code, out, _ = run(["inverse-trend", "--perturbation", 0.5, "--sizes", "2,3,4,5"], capsys)
    rows = trend_rows(out)
    assert code == 0
    assert all(float(r["norm_a_inverse"]) <= 2 + 1e-8 for r in rows)
    assert all(float(r["residual"]) <= 1e-10 for r in rows)


def test_inverse_trend_singular_rows(capsys):
    code, out, _ = run(["inverse-trend", "--kind", "identity", "--perturbation", 1, "--format", "json"], capsys)
    rows = json.loads(out)["rows"]
    assert code == 0
    assert all(r["status"].startswith("singular") for r in rows)


def test_inverse_trend_capacity(capsys):
    assert run(["inverse-trend", "--sizes", "23"], capsys)[0] == 2
