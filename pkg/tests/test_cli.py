import csv
import io
import json
import subprocess
import sys

import pytest

from dtnforms.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_example(capsys):
    code, out, _ = run(capsys, "spectrum", "--n", "2", "--p", "1", "--max-k", "2", "--json")
    assert code == 0
    data = json.loads(out)
    assert [(d["eigenvalue"], d["multiplicity"]) for d in data] == [("5/3", 3), ("2", 3), ("14/5", 5), ("3", 5)]


def test_spectrum_usage_error(capsys):
    code, _, err = run(capsys, "spectrum", "--n", "2", "--p", "9")
    assert code == 2 and "p must be" in err


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--n", "2", "--p", "1", "--bogus"])
    assert exc.value.code == 2


def test_verify_ball_report(capsys):
    code, out, _ = run(capsys, "verify-ball", "--n", "2", "--max-k", "3")
    assert code == 0
    rows = json.loads(out)
    assert rows and all(r["verified"] for r in rows)
    assert set(rows[0]) == {"family", "n", "k", "p", "eigenvalue", "multiplicity", "verified"}
    assert {r["p"] for r in rows} == {0, 1, 2}


def test_verify_ball_csv(capsys):
    code, out, _ = run(capsys, "verify-ball", "--n", "1", "--p", "1", "--max-k", "2", "--csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0].keys() == {"family", "n", "k", "p", "eigenvalue", "multiplicity", "verified"}
    assert all(r["verified"] == "True" for r in rows)


def test_verify_ball_failure_exit_code(capsys, monkeypatch):
    from fractions import Fraction

    import dtnforms.ball as ball

    monkeypatch.setattr(ball, "exact_extension_constants", lambda n, k, p: (Fraction(1), Fraction(1), Fraction(-3)))
    code, out, err = run(capsys, "verify-ball", "--n", "2", "--p", "1", "--max-k", "1")
    assert code == 1
    assert "failed checks" in err
    assert not all(r["verified"] for r in json.loads(out))


def test_eigenform(capsys):
    code, out, _ = run(capsys, "eigenform", "--n", "2", "--k", "1", "--p", "1", "--family", "exact")
    assert code == 0
    rec = json.loads(out)
    assert rec["eigenvalue"] == "5/3" and rec["verified"]
    assert rec["extension"].startswith("(-2*x1^2 + x2^2 + x3^2 + 2) * dx1")
    code, _, _ = run(capsys, "eigenform", "--n", "2", "--k", "1", "--p", "1", "--index", "7")
    assert code == 2


def test_radial(capsys):
    code, out, _ = run(capsys, "radial", "--n", "2", "--p", "1", "--k", "1")
    rec = json.loads(out)
    assert code == 0 and abs(rec["nu"]["value"] - 2) < 1e-8 and rec["nu"]["tolerance"] == 1e-8
    code, out, _ = run(capsys, "radial", "--n", "2", "--p", "2", "--profile", "hyperbolic", "--R", "0.5", "1", "--csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 2
    for r in rows:
        assert abs(float(r["nu"]) - float(r["volume_ratio"])) < 1e-8
    code, _, _ = run(capsys, "radial", "--n", "2", "--p", "1", "--profile", "spherical", "--R", "4")
    assert code == 2


def test_galerkin_json_keys(capsys):
    code, out, _ = run(capsys, "galerkin", "--n", "2", "--p", "1", "--D", "2")
    rec = json.loads(out)
    assert code == 0
    assert {"domain", "n", "p", "D", "galerkin_value", "closed_form", "iso_rhs", "verdict"} <= set(rec)
    assert rec["galerkin_value"] == "5/3" and rec["closed_form"] == "5/3" and rec["iso_rhs"] == "2"


def test_iso_check_ellipsoid(capsys):
    code, out, _ = run(capsys, "iso-check", "--n", "2", "--p", "1", "--D", "2", "--domain", "ellipsoid", "--axes", "2,1,1")
    rec = json.loads(out)
    assert code == 0 and rec["verdict"] == "confirmed"
    assert rec["closed_form"] is None and "tolerance" in rec["galerkin_value"]
    code, _, err = run(capsys, "iso-check", "--n", "2", "--p", "1", "--domain", "ellipsoid", "--axes", "2,1")
    assert code == 2 and "semi-axes" in err
    code, _, _ = run(capsys, "iso-check", "--n", "2", "--p", "0")
    assert code == 2


def test_vf3(capsys):
    code, out, _ = run(capsys, "vf3", "--field", "2 - 2*x1^2 + x2^2 + x3^2; -3*x1*x2; -3*x1*x3")
    assert code == 0 and json.loads(out)["quotient"] == "5/3"
    code, out, _ = run(capsys, "vf3", "--field", "x1; x2; x3", "--boundary", "normal")
    assert json.loads(out)["quotient"] == "3"
    code, _, _ = run(capsys, "vf3", "--field", "x1; x2; x3", "--boundary", "tangent")
    assert code == 2


def test_moments_seeded(capsys):
    code, out, _ = run(capsys, "--seed", "5", "moments", "--n", "3", "--p", "2")
    rec = json.loads(out)
    assert code == 0 and rec["ok"] and rec["seed"] == 5
    assert rec["full"] == "12" and rec["normal_component"] == "6"
    code2, out2, _ = run(capsys, "--seed", "5", "moments", "--n", "3", "--p", "2")
    assert out2 == out


def test_dims(capsys):
    code, out, _ = run(capsys, "dims", "--n", "2", "--max-k", "1")
    rows = json.loads(out)
    assert code == 0 and {"n": 2, "k": 1, "p": 1, "dimP": 9, "dimH": 8, "dimH'": 5, "dimH''": 3} in rows


def test_pretty(capsys):
    code, out, _ = run(capsys, "spectrum", "--n", "1", "--p", "1", "--max-k", "1", "--pretty")
    assert code == 0 and out.startswith("eigenvalue=2  multiplicity=3")


def test_byte_identical_across_processes():
    cmd = [sys.executable, "-m", "dtnforms.cli", "iso-check", "--n", "2", "--p", "2", "--D", "2",
           "--domain", "ellipsoid", "--axes", "3/2,1,1"]
    env_runs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
    assert env_runs[0] == env_runs[1]
    assert json.loads(env_runs[0])["verdict"] == "confirmed"


def test_thread_env(monkeypatch, capsys):
    monkeypatch.setenv("DTNFORMS_THREADS", "1")
    code, _, _ = run(capsys, "spectrum", "--n", "2", "--p", "2", "--max-k", "1")
    assert code == 0
