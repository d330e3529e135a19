"""Command-line front end: matrix I/O, square roots, coefficient tables,
kappa contour grids, and benchmark runs.

Exit codes: 0 success, 1 usage or parse error, 2 numerical failure
(non-convergence or a singular matrix). Matrix files are either
Matrix Market "array complex general" (real general accepted on read)
or a CSV grid with ';' between cells and ',' between the real and
imaginary parts of each cell.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .corpus import (
    TestCase,
    bench_cases,
    bench_methods,
    emit_csv,
    method_label,
    run_suite,
)
from .linalg import SingularMatrixError, dense, norm
from .sqrtm import IterationAbortError, IterationOptions, sqrtm_drive
from .zolofuncs import (
    ZoloParams,
    _kappa_values,
    build_partial_fraction,
    pade_partial_fraction,
    phi_of,
    rho_of,
)

_EPS = 2.0 ** -53

__all__ = [
    "main",
    "read_matrix",
    "write_matrix",
    "cmd_sqrtm",
    "cmd_coeffs",
    "cmd_contour",
    "cmd_bench",
]


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; remap to the documented code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_float(token: str, path: str, lineno: int) -> float:
    token = token.strip()
    if "j" in token or "J" in token:
        raise ValueError(
            f"{path}:{lineno}: complex cell syntax is not accepted; "
            "use paired re,im columns"
        )
    try:
        return float(token)
    except ValueError:
        raise ValueError(f"{path}:{lineno}: cannot parse number {token!r}") from None


def _require_square(rows: list[list[complex]], path: str):
    n = len(rows)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ValueError(
                f"{path}: matrix is not square ({n} rows, "
                f"row {i + 1} has {len(row)} columns)"
            )


def _read_csv_matrix(path: str) -> np.ndarray:
    rows: list[list[complex]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            row = []
            for cell in line.split(";"):
                parts = cell.split(",")
                if len(parts) != 2:
                    raise ValueError(
                        f"{path}:{lineno}: cell {cell!r} is not 're,im'"
                    )
                re = _parse_float(parts[0], path, lineno)
                im = _parse_float(parts[1], path, lineno)
                row.append(complex(re, im))
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    _require_square(rows, path)
    return np.array(rows, dtype=complex)


def _read_mm_matrix(path: str) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    header = lines[0].strip().lower().split()
    if (len(header) != 5 or header[0] != "%%matrixmarket"
            or header[1] != "matrix" or header[2] != "array"
            or header[3] not in ("complex", "real") or header[4] != "general"):
        raise ValueError(
            f"{path}:1: expected header '%%MatrixMarket matrix array "
            f"complex general', got {lines[0].strip()!r}"
        )
    is_complex = header[3] == "complex"
    body = [(i + 1, ln.strip()) for i, ln in enumerate(lines[1:], start=1)
            if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise ValueError(f"{path}: missing size line")
    lineno, size_line = body[0]
    dims = size_line.split()
    if len(dims) != 2:
        raise ValueError(f"{path}:{lineno}: size line must be 'rows cols'")
    nrows = int(_parse_float(dims[0], path, lineno))
    ncols = int(_parse_float(dims[1], path, lineno))
    if nrows != ncols:
        raise ValueError(f"{path}: matrix is not square ({nrows}x{ncols})")
    entries = body[1:]
    if len(entries) != nrows * ncols:
        raise ValueError(
            f"{path}: expected {nrows * ncols} entries, found {len(entries)}"
        )
    M = np.empty((nrows, ncols), dtype=complex)
    pos = 0
    for j in range(ncols):  # array format is column-major
        for i in range(nrows):
            lineno, text = entries[pos]
            parts = text.split()
            if is_complex:
                if len(parts) != 2:
                    raise ValueError(
                        f"{path}:{lineno}: expected 're im', got {text!r}"
                    )
                M[i, j] = complex(_parse_float(parts[0], path, lineno),
                                  _parse_float(parts[1], path, lineno))
            else:
                if len(parts) != 1:
                    raise ValueError(
                        f"{path}:{lineno}: expected one value, got {text!r}"
                    )
                M[i, j] = _parse_float(parts[0], path, lineno)
            pos += 1
    return M


def read_matrix(path: str, format: str = "matrixmarket") -> np.ndarray:
    """Read a square complex matrix from a Matrix Market array file or a
    're,im;re,im' CSV grid. Parse errors carry the offending line number."""
    if format == "matrixmarket":
        return dense(_read_mm_matrix(path))
    if format == "csv":
        return dense(_read_csv_matrix(path))
    raise ValueError(f"unknown matrix format {format!r}")


def write_matrix(M: np.ndarray, path: str, format: str = "matrixmarket") -> None:
    """Write M so that read_matrix returns it bit-exactly (shortest
    round-trip decimals via repr)."""
    M = dense(M)
    n = M.shape[0]
    if format == "matrixmarket":
        out = ["%%MatrixMarket matrix array complex general", f"{n} {n}"]
        for j in range(n):
            for i in range(n):
                z = M[i, j]
                out.append(f"{float(z.real)!r} {float(z.imag)!r}")
        text = "\n".join(out) + "\n"
    elif format == "csv":
        text = "\n".join(
            ";".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row)
            for row in M
        ) + "\n"
    else:
        raise ValueError(f"unknown matrix format {format!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _check_overwrite(path: str, force: bool) -> None:
    if os.path.exists(path) and not force:
        raise FileExistsError(
            f"refusing to overwrite {path} (pass --force to allow)"
        )


def _inverse_path(path: str) -> str:
    root, ext = os.path.splitext(path)
    return f"{root}.inv{ext}" if ext else f"{path}.inv"


def cmd_sqrtm(cfg) -> int:
    A = read_matrix(cfg.input, cfg.format)
    opts = IterationOptions(
        method=cfg.method, m=cfg.m, ell=cfg.ell,
        alpha_override=cfg.alpha, form=cfg.form,
        delta=cfg.delta, max_iter=cfg.max_iter,
    )
    _check_overwrite(cfg.output, cfg.force)
    inv_path = _inverse_path(cfg.output)
    if cfg.inverse:
        _check_overwrite(inv_path, cfg.force)
    X, Xinv, report = sqrtm_drive(A, opts)
    write_matrix(X, cfg.output, cfg.format)
    if cfg.inverse:
        write_matrix(Xinv, inv_path, cfg.format)
    print(f"iterations: {report.iterations}")
    print(f"residual: {report.residual:.6e}")
    print(f"alpha: {report.alpha:.6e}")
    print(f"reason: {report.reason}")
    return 0 if report.reason == "criterion_satisfied" else 2


def cmd_coeffs(cfg) -> int:
    if cfg.alpha is None or cfg.alpha >= 1.0:
        pf = pade_partial_fraction(cfg.m, cfg.ell)
    else:
        pf = build_partial_fraction(ZoloParams(cfg.m, cfg.ell, cfg.alpha))
    lines = ["kind,index,value", f"scale,0,{pf.scale:.17g}"]
    lines += [f"residue,{j + 1},{a:.17g}" for j, a in enumerate(pf.residues)]
    lines += [f"shift,{j + 1},{c:.17g}" for j, c in enumerate(pf.shifts)]
    lines += [f"c,{j + 1},{c:.17g}" for j, c in enumerate(pf.all_c)]
    print("\n".join(lines))
    return 0


def _parse_grid(text: str):
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"grid must be 'NRxNTHETA', got {text!r}")
    n_r, n_theta = int(parts[0]), int(parts[1])
    if n_r < 1 or n_theta < 1:
        raise ValueError("grid dimensions must be positive")
    return n_r, n_theta


def cmd_contour(cfg) -> int:
    alpha = cfg.alpha
    if not (0.0 < alpha < 1.0):
        raise ValueError("--alpha must lie in (0, 1)")
    n_r, n_theta = _parse_grid(cfg.grid)
    order = cfg.m + cfg.ell + 1
    log_r = np.linspace(2.0 * math.log10(alpha), 0.0, n_r)
    theta = -math.pi + (np.arange(n_theta) + 0.5) * (2.0 * math.pi / n_theta)
    z = 10.0 ** log_r[:, None] * np.exp(1j * theta[None, :])
    if cfg.mode == "pade":
        abs_phi = np.abs(phi_of(z / alpha, 1.0))
        guard_floor = np.zeros_like(abs_phi)
    else:
        abs_phi = np.abs(phi_of(z, alpha))
        guard_floor = np.full_like(abs_phi, 4.0 * rho_of(alpha) ** (-2 * order))
    kappa = _kappa_values(abs_phi, order, 1e-16)
    with np.errstate(divide="ignore", over="ignore"):
        guard = np.maximum(2.0 * abs_phi ** (-2.0 * order), guard_floor)
    outside = int(np.count_nonzero(~(guard < 1.0)))
    if outside:
        print(f"{outside} grid points outside the estimate's validity region",
              file=sys.stderr)
    lines = ["log10_abs_z,arg_z,kappa"]
    for i in range(n_r):
        for j in range(n_theta):
            lines.append(
                f"{float(log_r[i])!r},{float(theta[j])!r},{float(kappa[i, j])!r}"
            )
    _emit_text("\n".join(lines) + "\n", cfg.output, cfg.force)
    return 0


def _emit_text(text: str, path: str | None, force: bool) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        _check_overwrite(path, force)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _hermitian_flag(A: np.ndarray) -> bool:
    return norm(A - A.conj().T, "max") <= 8.0 * _EPS * norm(A, "max")


def _load_directory_cases(directory: str) -> list[TestCase]:
    cases = []
    for name in sorted(os.listdir(directory)):
        stem, ext = os.path.splitext(name)
        ext = ext.lower()
        if ext not in (".mtx", ".csv"):
            continue
        fmt = "matrixmarket" if ext == ".mtx" else "csv"
        A = read_matrix(os.path.join(directory, name), fmt)
        cases.append(TestCase(stem, A, hermitian_flag=_hermitian_flag(A)))
    if not cases:
        raise ValueError(f"no .mtx or .csv matrix files found in {directory}")
    return cases


def cmd_bench(cfg) -> int:
    cases = _load_directory_cases(cfg.directory) if cfg.directory else bench_cases()
    methods = bench_methods()
    if cfg.methods:
        by_label = {method_label(m): m for m in methods}
        unknown = [lab for lab in cfg.methods if lab not in by_label]
        if unknown:
            raise ValueError(
                f"unknown method label(s) {unknown}; "
                f"choose from {sorted(by_label)}"
            )
        methods = [by_label[lab] for lab in cfg.methods]
    rows = run_suite(cases, methods)
    _emit_text(emit_csv(rows), cfg.output, cfg.force)
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="zolosqrt",
                     description="Matrix square roots by rational minimax "
                                 "iterations, with comparators and analysis tools.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sq = sub.add_parser("sqrtm", help="compute A^(1/2) (and optionally A^(-1/2))")
    sq.add_argument("input", help="input matrix file")
    sq.add_argument("-o", "--output", required=True, help="output matrix file")
    sq.add_argument("--format", choices=("matrixmarket", "csv"),
                    default="matrixmarket")
    sq.add_argument("--method", choices=("zolotarev", "pade", "denman_beavers"),
                    default="zolotarev")
    sq.add_argument("--m", type=int, default=8)
    sq.add_argument("--ell", type=int, default=8)
    sq.add_argument("--alpha", type=float, default=None,
                    help="override the interval parameter")
    sq.add_argument("--delta", type=float, default=None,
                    help="termination tolerance (default: u*sqrt(n))")
    sq.add_argument("--max-iter", type=int, default=20)
    sq.add_argument("--form", choices=("full", "alt"), default="alt")
    sq.add_argument("--inverse", action="store_true",
                    help="also write the inverse square root")
    sq.add_argument("--force", action="store_true",
                    help="overwrite existing output files")

    co = sub.add_parser("coeffs", help="print partial-fraction coefficients")
    co.add_argument("--m", type=int, required=True)
    co.add_argument("--ell", type=int, required=True)
    co.add_argument("--alpha", type=float, default=None,
                    help="absent or >= 1 selects the Pade limit")

    ct = sub.add_parser("contour", help="emit a kappa grid over the slit annulus")
    ct.add_argument("--m", type=int, required=True)
    ct.add_argument("--ell", type=int, required=True)
    ct.add_argument("--alpha", type=float, required=True)
    ct.add_argument("--grid", default="400x400", help="NRxNTHETA (default 400x400)")
    ct.add_argument("--mode", choices=("zolotarev", "pade"), default="zolotarev")
    ct.add_argument("-o", "--output", default=None, help="default: stdout")
    ct.add_argument("--force", action="store_true")

    be = sub.add_parser("bench", help="run the benchmark suite")
    be.add_argument("directory", nargs="?", default=None,
                    help="directory of .mtx/.csv matrices (default: built-in corpus)")
    be.add_argument("--methods", nargs="+", default=None,
                    metavar="LABEL", help="e.g. Z-(8,8) P-(1,0) DB")
    be.add_argument("-o", "--output", default=None, help="default: stdout")
    be.add_argument("--force", action="store_true")
    return parser


_DISPATCH = {
    "sqrtm": cmd_sqrtm,
    "coeffs": cmd_coeffs,
    "contour": cmd_contour,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        cfg = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _DISPATCH[cfg.subcommand](cfg)
    except (SingularMatrixError, IterationAbortError) as exc:
        print(f"zolosqrt: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"zolosqrt: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
