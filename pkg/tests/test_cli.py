"""Command-line front-end tests: file formats, subcommands, exit codes."""

import csv
import io
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from zolosqrt.cli import main, read_matrix, write_matrix

TRICKY = np.array([
    [1e-308 + 0.0j, complex(-0.0, 2.0 ** -1074)],
    [-1.7976931348623157e308 + 0.3j, 0.1 + 1j / 3.0],
])


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


# ------------------------------------------------------------------ file IO

def test_csv_identity_roundtrip(tmp_path):
    p = str(tmp_path / "eye.csv")
    write_matrix(np.eye(2), p, "csv")
    assert np.array_equal(read_matrix(p, "csv"), np.eye(2))


@pytest.mark.parametrize("fmt", ["matrixmarket", "csv"])
def test_roundtrip_bit_exact(tmp_path, fmt):
    rng = np.random.default_rng(12)
    M = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    p = str(tmp_path / "m.dat")
    write_matrix(M, p, fmt)
    assert np.array_equal(read_matrix(p, fmt), M)


@pytest.mark.parametrize("fmt", ["matrixmarket", "csv"])
def test_roundtrip_extreme_values(tmp_path, fmt):
    p = str(tmp_path / "tricky.dat")
    write_matrix(TRICKY, p, fmt)
    back = read_matrix(p, fmt)
    assert np.array_equal(back, TRICKY)
    # signed zero survives the round-trip as well
    assert math.copysign(1.0, back[0, 1].real) == -1.0


def test_mm_header_and_real_variant(tmp_path):
    text = ("%%MatrixMarket matrix array complex general\n"
            "2 2\n1.0 0.0\n0.0 0.0\n0.0 0.0\n1.0 0.0\n")
    p = _write(tmp_path / "c.mtx", text)
    assert np.array_equal(read_matrix(p), np.eye(2))
    text = ("%%MatrixMarket matrix array real general\n"
            "% column-major order\n"
            "2 2\n1.0\n3.0\n2.0\n4.0\n")
    p = _write(tmp_path / "r.mtx", text)
    assert np.array_equal(read_matrix(p), np.array([[1.0, 2.0], [3.0, 4.0]]))


def test_mm_rejects_bad_header(tmp_path):
    p = _write(tmp_path / "bad.mtx", "%%MatrixMarket matrix coordinate real general\n1 1\n1\n")
    with pytest.raises(ValueError, match="header"):
        read_matrix(p)


def test_mm_rejects_nonsquare(tmp_path):
    p = _write(tmp_path / "rect.mtx",
               "%%MatrixMarket matrix array complex general\n2 3\n" + "0 0\n" * 6)
    with pytest.raises(ValueError, match="not square"):
        read_matrix(p)


def test_mm_rejects_wrong_entry_count(tmp_path):
    p = _write(tmp_path / "short.mtx",
               "%%MatrixMarket matrix array complex general\n2 2\n1 0\n2 0\n3 0\n")
    with pytest.raises(ValueError, match="expected 4 entries"):
        read_matrix(p)


def test_mm_parse_error_carries_line_number(tmp_path):
    text = ("%%MatrixMarket matrix array complex general\n"
            "2 2\n1.0 0.0\nfoo 0.0\n0.0 0.0\n1.0 0.0\n")
    p = _write(tmp_path / "bad.mtx", text)
    with pytest.raises(ValueError, match=r":4:"):
        read_matrix(p)


def test_csv_rejects_nonsquare(tmp_path):
    p = _write(tmp_path / "rect.csv", "1,0;2,0;3,0\n4,0;5,0;6,0\n")
    with pytest.raises(ValueError, match="not square"):
        read_matrix(p, "csv")


def test_csv_parse_error_carries_line_number(tmp_path):
    p = _write(tmp_path / "bad.csv", "1,0;0,0\n0,x;1,0\n")
    with pytest.raises(ValueError, match=r":2:"):
        read_matrix(p, "csv")


def test_csv_rejects_complex_literal_syntax(tmp_path):
    p = _write(tmp_path / "j.csv", "1j,0;0,0\n0,0;1,0\n")
    with pytest.raises(ValueError, match="paired re,im"):
        read_matrix(p, "csv")


def test_csv_rejects_unpaired_cell(tmp_path):
    p = _write(tmp_path / "p.csv", "1;0\n0;1\n")
    with pytest.raises(ValueError, match="'re,im'"):
        read_matrix(p, "csv")


def test_unknown_format_rejected(tmp_path):
    with pytest.raises(ValueError, match="format"):
        read_matrix(str(tmp_path / "x.dat"), "json")
    with pytest.raises(ValueError, match="format"):
        write_matrix(np.eye(2), str(tmp_path / "x.dat"), "json")


def test_empty_file_rejected(tmp_path):
    p = _write(tmp_path / "empty.csv", "")
    with pytest.raises(ValueError, match="empty"):
        read_matrix(p, "csv")


# -------------------------------------------------------------- sqrtm front

def _stdout_field(capsys, name):
    for line in capsys.readouterr().out.splitlines():
        if line.startswith(name + ":"):
            return line.split(":", 1)[1].strip()
    raise AssertionError(f"field {name} not printed")


def test_cmd_sqrtm_identity(tmp_path, capsys):
    src = str(tmp_path / "a.mtx")
    dst = str(tmp_path / "x.mtx")
    write_matrix(np.eye(3), src)
    assert main(["sqrtm", src, "-o", dst]) == 0
    assert int(_stdout_field(capsys, "iterations")) <= 1
    assert_allclose(read_matrix(dst), np.eye(3), atol=1e-14)


def test_cmd_sqrtm_rotation(tmp_path, capsys):
    src = str(tmp_path / "a.mtx")
    dst = str(tmp_path / "x.mtx")
    write_matrix(np.array([[0.0, 1.0], [-1.0, 0.0]]), src)
    assert main(["sqrtm", src, "-o", dst]) == 0
    assert float(_stdout_field(capsys, "residual")) <= 1e-13
    want = math.sqrt(2.0) / 2.0 * np.array([[1.0, 1.0], [-1.0, 1.0]])
    assert np.max(np.abs(read_matrix(dst) - want)) <= 1e-13


def test_cmd_sqrtm_singular_input(tmp_path, capsys):
    src = str(tmp_path / "a.mtx")
    write_matrix(np.zeros((2, 2)), src)
    assert main(["sqrtm", src, "-o", str(tmp_path / "x.mtx")]) == 2
    assert "numerical failure" in capsys.readouterr().err


def test_cmd_sqrtm_overwrite_refused(tmp_path, capsys):
    src = str(tmp_path / "a.mtx")
    dst = str(tmp_path / "x.mtx")
    write_matrix(np.eye(2), src)
    write_matrix(np.eye(2), dst)
    assert main(["sqrtm", src, "-o", dst]) == 1
    assert "refusing to overwrite" in capsys.readouterr().err
    assert main(["sqrtm", src, "-o", dst, "--force"]) == 0


def test_cmd_sqrtm_inverse_output(tmp_path, capsys):
    src = str(tmp_path / "a.mtx")
    dst = str(tmp_path / "x.mtx")
    write_matrix(np.diag([4.0, 9.0]), src)
    assert main(["sqrtm", src, "-o", dst, "--inverse"]) == 0
    X = read_matrix(dst)
    Xinv = read_matrix(str(tmp_path / "x.inv.mtx"))
    assert_allclose(X, np.diag([2.0, 3.0]), atol=1e-13)
    assert_allclose(X @ Xinv, np.eye(2), atol=1e-13)


def test_cmd_sqrtm_invalid_type_pair(tmp_path, capsys):
    src = str(tmp_path / "a.mtx")
    write_matrix(np.eye(2), src)
    code = main(["sqrtm", src, "-o", str(tmp_path / "x.mtx"),
                 "--m", "2", "--ell", "0"])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_cmd_sqrtm_missing_file(tmp_path, capsys):
    code = main(["sqrtm", str(tmp_path / "nope.mtx"),
                 "-o", str(tmp_path / "x.mtx")])
    assert code == 1


# ------------------------------------------------------------------- coeffs

def _coeff_table(capsys):
    out = capsys.readouterr().out
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["kind", "index", "value"]
    table = {}
    for kind, idx, val in rows[1:]:
        table.setdefault(kind, []).append(float(val))
    return table


def test_cmd_coeffs_newton(capsys):
    assert main(["coeffs", "--m", "1", "--ell", "0", "--alpha", "0.29"]) == 0
    t = _coeff_table(capsys)
    assert t["shift"][0] == pytest.approx(0.29, rel=1e-12)
    assert t["scale"][0] * t["residue"][0] == pytest.approx(
        2.0 * math.sqrt(0.29), rel=1e-12)


def test_cmd_coeffs_pade_limit(capsys):
    assert main(["coeffs", "--m", "1", "--ell", "1"]) == 0
    t = _coeff_table(capsys)
    assert t["shift"][0] == pytest.approx(1.0 / 3.0, rel=1e-13)
    assert t["c"][1] == pytest.approx(3.0, rel=1e-13)


def test_cmd_coeffs_17_digit_roundtrip(capsys):
    from zolosqrt.zolofuncs import ZoloParams, build_partial_fraction

    assert main(["coeffs", "--m", "3", "--ell", "2", "--alpha", "0.07"]) == 0
    t = _coeff_table(capsys)
    pf = build_partial_fraction(ZoloParams(3, 2, 0.07))
    assert t["shift"] == list(pf.shifts)  # 17 digits round-trip exactly
    assert t["residue"] == list(pf.residues)


def test_cmd_coeffs_invalid_pair(capsys):
    assert main(["coeffs", "--m", "2", "--ell", "0", "--alpha", "0.5"]) == 1
    assert "error" in capsys.readouterr().err


# ------------------------------------------------------------------ contour

def _contour_rows(capsys):
    err_then_out = capsys.readouterr()
    rows = list(csv.reader(io.StringIO(err_then_out.out)))
    assert rows[0] == ["log10_abs_z", "arg_z", "kappa"]
    return [(float(a), float(b), float(c)) for a, b, c in rows[1:]]


def test_cmd_contour_grid_shape(capsys):
    assert main(["contour", "--m", "2", "--ell", "1", "--alpha", "0.1",
                 "--grid", "5x8"]) == 0
    rows = _contour_rows(capsys)
    assert len(rows) == 40
    assert all(np.isfinite(k) and k > 0 for _, _, k in rows)


def test_cmd_contour_half_annulus_iteration_counts(capsys):
    # right half-plane probes of the widest benchmark type need at most
    # two iterations even at alpha = 1e-5
    assert main(["contour", "--m", "8", "--ell", "8", "--alpha", "1e-5",
                 "--grid", "30x40"]) == 0
    rows = _contour_rows(capsys)
    right = [k for _, th, k in rows if abs(th) <= math.pi / 2]
    assert right and all(math.ceil(k) <= 2 for k in right)


def test_cmd_contour_writes_file(tmp_path, capsys):
    out = str(tmp_path / "grid.csv")
    assert main(["contour", "--m", "1", "--ell", "0", "--alpha", "0.5",
                 "--grid", "3x4", "-o", out]) == 0
    text = open(out, encoding="utf-8").read()
    assert text.startswith("log10_abs_z,arg_z,kappa\n")
    assert len(text.strip().split("\n")) == 13


def test_cmd_contour_validation(capsys):
    assert main(["contour", "--m", "1", "--ell", "0", "--alpha", "1.5",
                 "--grid", "3x3"]) == 1
    capsys.readouterr()
    assert main(["contour", "--m", "1", "--ell", "0", "--alpha", "0.5",
                 "--grid", "9"]) == 1
    assert "grid" in capsys.readouterr().err


# -------------------------------------------------------------------- bench

def _bench_rows(text):
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0][0] == "case"
    return rows[1:]


def test_cmd_bench_full_table(capsys):
    assert main(["bench"]) == 0
    first = capsys.readouterr().out
    assert len(_bench_rows(first)) == 35  # 5 cases x 7 methods
    assert main(["bench"]) == 0
    assert capsys.readouterr().out == first  # deterministic, byte for byte


def test_cmd_bench_method_filter(capsys):
    assert main(["bench", "--methods", "Z-(8,8)", "DB"]) == 0
    rows = _bench_rows(capsys.readouterr().out)
    assert len(rows) == 10
    assert {r[1] for r in rows} == {"Z-(8,8)", "DB"}


def test_cmd_bench_unknown_method(capsys):
    assert main(["bench", "--methods", "Q-(3,3)"]) == 1
    assert "unknown method label" in capsys.readouterr().err


def test_cmd_bench_directory(tmp_path, capsys):
    write_matrix(np.eye(2), str(tmp_path / "idty.mtx"))
    write_matrix(np.diag([1.0, 4.0]), str(tmp_path / "diag.csv"), "csv")
    (tmp_path / "notes.txt").write_text("ignored", encoding="utf-8")
    assert main(["bench", str(tmp_path), "--methods", "Z-(1,0)", "DB"]) == 0
    rows = _bench_rows(capsys.readouterr().out)
    assert [(r[0], r[1]) for r in rows] == [
        ("diag", "Z-(1,0)"), ("diag", "DB"),
        ("idty", "Z-(1,0)"), ("idty", "DB")]


def test_cmd_bench_empty_directory(tmp_path, capsys):
    assert main(["bench", str(tmp_path)]) == 1
    assert "no .mtx or .csv" in capsys.readouterr().err


# -------------------------------------------------------------------- usage

def test_usage_errors_exit_one(capsys):
    assert main([]) == 1
    capsys.readouterr()
    assert main(["sqrtm"]) == 1
    capsys.readouterr()
    assert main(["frobnicate"]) == 1
