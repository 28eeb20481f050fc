import csv
import io
import json
import math

import pytest

from vacuumless.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_spectrum_window(capsys):
    code, out, _ = run(capsys, "spectrum", "--window", "-3:3", "--c", "1")
    assert code == 0
    table = rows(out)
    assert [int(r["p"]) for r in table] == list(range(-3, 4))
    eps = {int(r["p"]): float(r["eps"]) for r in table}
    assert eps[-3] == 1 - 2 * math.sqrt(3)
    assert eps[0] == 1
    assert eps[3] == 1 + 2 * math.sqrt(3)


def test_seventeen_digits(capsys):
    _, out, _ = run(capsys, "spectrum", "--window", "2:2")
    assert out.splitlines()[1] == "2," + format(1 + 2 * math.sqrt(2), ".17g")


def test_scan_uncertainty_choice1(capsys):
    code, out, _ = run(capsys, "scan-uncertainty", "--choice", "1", "--rmax", "0.6", "--rsteps", "3")
    assert code == 0
    got = [float(r["dxdp_direct"]) for r in rows(out)]
    assert got == pytest.approx([0.5, 0.455, 0.32], abs=1e-12)


def test_scan_uncertainty_angles(capsys):
    code, out, _ = run(capsys, "scan-uncertainty", "--choice", "3", "--rmax", "2", "--rsteps", "2",
                       "--asteps", "4")
    assert code == 0
    table = rows(out)
    assert len(table) == 8
    assert all(abs(float(r["dxdp_direct"]) - 0.5) <= 1e-8 for r in table)


def test_factorize(capsys):
    code, out, _ = run(capsys, "factorize")
    assert code == 0
    table = rows(out)
    assert [r["choice"] for r in table] == ["1", "2", "3"]
    assert all(r["compatible"] == "true" and float(r["factorization_residual"]) <= 1e-12 for r in table)


def test_coherent_json(capsys):
    code, out, _ = run(capsys, "coherent", "--choice", "1", "--z", "0.3,0.4", "--format", "json")
    assert code == 0
    data = json.loads(out)
    rec = data["rows"][0]
    assert isinstance(rec["normalization"], str)
    assert float(rec["normalization"]) == pytest.approx(math.sqrt(0.75), abs=1e-12)
    assert float(rec["eigen_residual"]) <= 1e-6


def test_coherent_negative_label(capsys):
    code, out, _ = run(capsys, "coherent", "--choice", "3", "--z", "-1.5,0")
    assert code == 0
    assert rows(out)[0]["z_re"] == "-1.5"


def test_coherent_outside_disk(capsys):
    code, out, err = run(capsys, "coherent", "--choice", "1", "--z", "1.5")
    assert code == 2 and out == "" and "outside" in err


def test_usage_errors(capsys):
    assert run(capsys, "spectrum", "--window", "3:1")[0] == 2
    assert run(capsys, "coherent", "--z", "a,b")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "moments", "--measure", "nope")[0] == 2
    assert run(capsys, "fock", "--fock-n", "2")[0] == 2
    assert run(capsys, "spectrum", "--c", "-1")[0] == 2


def test_moments_named_and_file(capsys, tmp_path):
    code, out, _ = run(capsys, "moments", "--choice", "3", "--measure", "choice3-gaussian", "--kmax", "8")
    assert code == 0
    assert all(float(r["residual"]) <= 1e-8 for r in rows(out))
    code, out, err = run(capsys, "moments", "--choice", "1", "--measure", "choice1-atom", "--kmax", "4")
    assert code == 0 and "radius of convergence" in err
    path = tmp_path / "m.csv"
    path.write_text("0,0\n1,0.1\n2,0\n")
    code, out, _ = run(capsys, "moments", "--measure", f"file:{path}", "--kmax", "2")
    assert code == 0 and len(rows(out)) == 3


def test_moments_choice2_log_target(capsys):
    code, out, _ = run(capsys, "moments", "--choice", "2", "--kmax", "160")
    assert code == 0
    last = rows(out)[-1]
    assert last["target"] == "inf" and math.isfinite(float(last["log_target"]))


def test_resolution(capsys):
    code, out, _ = run(capsys, "resolution", "--choice", "3", "--pmax", "4")
    assert code == 0
    table = rows(out)
    assert len(table) == 25
    assert max(float(r["residual_abs"]) for r in table) <= 1e-6


def test_fock(capsys):
    code, out, err = run(capsys, "fock", "--fock-n", "12")
    assert code == 0 and "hermiticity defect 0.0" in err
    assert len(rows(out)) == 2 * 10 + 1


def test_out_file_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code, out, _ = run(capsys, "scan-uncertainty", "--choice", "2", "--rmax", "1.5", "--rsteps", "4",
                           "--out", str(path))
        assert code == 0 and out == ""
    assert a.read_bytes() == b.read_bytes()


def test_report(capsys):
    code, out, err = run(capsys, "report", "--choice", "3")
    assert code == 0
    table = rows(out)
    assert len(table) == 12 and all(r["passed"] == "true" for r in table)
    assert err.count("[PASS]") == 12
