import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from gaplab.cli import main, parse_complex, parse_grid, parse_matrix

FIXTURES = Path(__file__).resolve().parents[1] / "docs" / "families"


def write(tmp_path, name, document):
    p = tmp_path / name
    p.write_text(json.dumps(document))
    return str(p)


def scalar(tmp_path, name, value):
    return write(tmp_path, name, {"format_version": "1", "kind": "matrix", "dims": [1, 1],
                                  "entries": [[value]]})


def values(out, key):
    for line in out.splitlines():
        if line.startswith(key + " "):
            return line.split()[1:]
    raise KeyError(key)


def test_parsers():
    assert parse_complex("1,-2") == 1 - 2j
    assert parse_complex("3") == 3
    assert parse_grid("0,1,0,1,3") == (0, 1, 0, 1, 3)
    assert (parse_matrix("diag(1,2)") == [[1, 0], [0, 2]]).all()
    assert (parse_matrix("[[1, [0, 1]]]") == [[1, 1j]]).all()


def test_gap_identical_files(tmp_path, capsys):
    f = scalar(tmp_path, "a.json", 2)
    assert main(["gap", f, f]) == 0
    assert float(values(capsys.readouterr().out, "gap")[0]) <= 1e-15


def test_gap_scalar_closed_form(tmp_path, capsys):
    a, b = scalar(tmp_path, "a.json", 0), scalar(tmp_path, "b.json", 1)
    assert main(["gap", a, b]) == 0
    out = capsys.readouterr().out
    assert float(values(out, "gap")[0]) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert values(out, "identity_check") == ["ok"]


def test_gap_dimension_mismatch(tmp_path, capsys):
    a = scalar(tmp_path, "a.json", 0)
    b = write(tmp_path, "b.json", {"format_version": "1", "kind": "matrix", "dims": [2, 2],
                                   "entries": [[0, 0], [0, 0]]})
    assert main(["gap", a, b]) == 3
    assert "DimensionMismatch" in capsys.readouterr().err


def test_gap_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert main(["gap", str(bad), str(bad)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_gap_between_subspace_fixtures(capsys):
    f = str(FIXTURES / "kernel_line.json")
    assert main(["gap", f, f, "--at", "0.5,0"]) == 0


def test_charmat_examples(tmp_path, capsys):
    t2 = scalar(tmp_path, "t2.json", 2)
    assert main(["charmat", t2]) == 0
    rows = [l.strip(" []").split(", ") for l in capsys.readouterr().out.splitlines()[1:]]
    assert np.allclose(np.array(rows, dtype=float), [[0.2, 0.4], [0.4, 0.8]], rtol=0, atol=1e-12)
    assert main(["charmat", t2, "--relative", t2]) == 0
    rows_rel = [l.strip(" []").split(", ") for l in capsys.readouterr().out.splitlines()[1:]]
    assert np.allclose(np.array(rows_rel, dtype=float), [[0.2, 0.4], [0.4, 0.8]], rtol=0, atol=1e-10)
    one, minus = scalar(tmp_path, "one.json", 1), scalar(tmp_path, "m.json", -1)
    assert main(["charmat", one, "--relative", minus]) == 4
    assert "NotTransversal" in capsys.readouterr().err


def test_holo_check_examples(capsys):
    assert main(["holo-check", str(FIXTURES / "linear.json"), "--at", "0,0"]) == 0
    assert "classification holomorphic" in capsys.readouterr().out
    assert main(["holo-check", "--builtin", "conjugate", "--at", "0,0"]) == 1
    assert "classification not_holomorphic" in capsys.readouterr().out
    assert main(["holo-check", "--builtin", "resolvent", "--matrix", "diag(1,2)", "--at", "1,0"]) == 5
    assert "EvaluationFailed" in capsys.readouterr().err


def test_holo_check_modes(capsys):
    assert main(["holo-check", str(FIXTURES / "partial_shift.json"), "--at", "0.3,0.2",
                 "--mode", "resolution"]) == 0
    assert "Ran W(z0) = Dom T(z0)" in capsys.readouterr().out
    assert main(["holo-check", str(FIXTURES / "kernel_line.json"), "--at", "0,0",
                 "--mode", "subspace"]) == 0
    assert main(["holo-check", "--builtin", "kernel", "--at", "0,0"]) == 0
    assert main(["holo-check", "--builtin", "kernel-orthogonal", "--at", "0,0"]) == 1
    capsys.readouterr()
    assert main(["holo-check", str(FIXTURES / "kernel_line.json"), "--at", "0,0"]) == 2


def test_holo_check_transversality_failure(tmp_path, capsys):
    # T(z) = 1 - 2000 z at z0 = 0: the first probe point z = 1e-3 gives T = -1,
    # so 1 + T(z0)^* T(z) = 0 there
    f = write(tmp_path, "flip.json", {"format_version": "1", "kind": "matrix", "dims": [1, 1],
                                      "entries": [[{"num": [1, -2000]}]]})
    code = main(["holo-check", f, "--at", "0,0"])
    assert code == 4
    assert "NotTransversal" in capsys.readouterr().err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", "--suite", "nonsense"])
    assert info.value.code == 2
    assert main(["holo-check", "--at", "0,0"]) == 2
    assert main(["holo-check", "--builtin", "resolvent", "--at", "0,0"]) == 2
    assert main(["holo-check", "--builtin", "linear", "--at", "x"]) == 2


def test_bad_tolerance_file(tmp_path, monkeypatch, capsys):
    p = tmp_path / "tol.json"
    p.write_text('{"rank_tol": -1}')
    monkeypatch.setenv("GAPLAB_TOLERANCES", str(p))
    assert main(["holo-check", "--builtin", "linear", "--at", "0,0"]) == 2


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_scan_constant_family(tmp_path, capsys):
    f = write(tmp_path, "c.json", {"format_version": "1", "kind": "matrix", "dims": [2, 2],
                                   "entries": [[1, [0, 2]], [3, 4]]})
    out = tmp_path / "c.csv"
    assert main(["holo-scan", f, "--grid=-1,1,-1,1,4", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["re", "im", "cr_residual", "gap_modulus", "class", "status"]
    assert len(rows) == 17
    assert all(float(r[2]) < 1e-12 and r[4] == "H" and r[5] == "0" for r in rows[1:])


def test_scan_linear_unit_square(tmp_path, capsys):
    out = tmp_path / "l.csv"
    assert main(["holo-scan", str(FIXTURES / "linear.json"), "--grid", "0,1,0,1,5",
                 "--out", str(out)]) == 0
    rows = read_csv(out)[1:]
    assert len(rows) == 25 and all(r[4] == "H" for r in rows)
    # outer loop over the imaginary axis
    assert [float(r[1]) for r in rows[:5]] == [0.0] * 5


def test_scan_resolvent_failures_at_eigenvalues(tmp_path, capsys):
    out1, out2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    args = ["holo-scan", "--builtin", "resolvent", "--matrix", "diag(1,2)",
            "--grid", "0,3,0,3,7"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2), "--workers", "1"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    rows = read_csv(out1)[1:]
    failed = {(float(r[0]), float(r[1])) for r in rows if r[5] != "0"}
    assert failed == {(1.0, 0.0), (2.0, 0.0)}
    for r in rows:
        if r[5] != "0":
            assert r[5] == "5" and r[2] == "nan" and r[3] == "nan"
        else:
            assert r[4] == "H"


def test_verify_subset(capsys):
    assert main(["verify", "--suite", "grassmann", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "grassmann/" in out and "graphop/" not in out


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "gaplab.cli", "holo-check", "--builtin", "linear",
                        "--at", "0.5,0.5"], capture_output=True, text=True)
    assert r.returncode == 0 and "holomorphic" in r.stdout
