"""Minimal dense complex linear algebra on numpy/scipy kernels.

Matrices are plain complex128 ndarrays validated by dense(); pivoted LU
comes from LAPACK via scipy with singularity surfaced as a flag on the
factor object rather than an exception, so callers decide how hard to
fail. Determinants are carried in sign-and-log-magnitude form to keep
determinantal scaling overflow-free.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np
import scipy.linalg

_EPS = 2.0 ** -53
_POWER_SEED = 0x5EED5EED

__all__ = [
    "SingularMatrixError",
    "DenseMatrix",
    "LUFactors",
    "SpectralExtremes",
    "dense",
    "matmul",
    "lu_factor",
    "solve",
    "inverse",
    "norm",
    "two_norm_estimate",
    "extreme_eigen_moduli",
    "det_log_magnitude",
]

DenseMatrix = np.ndarray

NormKind = Literal["one", "inf", "fro", "max"]


class SingularMatrixError(ValueError):
    """A solve/inverse/determinant was requested on a singular factor."""


def dense(entries) -> DenseMatrix:
    """Validate and return a square complex128 matrix (row-major).

    Rejects non-square shapes and any NaN/Inf entry.
    """
    a = np.ascontiguousarray(entries, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


@dataclass(frozen=True)
class LUFactors:
    """Combined LU storage with pivots and determinant bookkeeping.

    ``singular`` is set when some pivot magnitude falls below
    n*u*norm(A, inf); solve/inverse/det refuse flagged factors.
    ``det_phase`` is the unit-modulus factor with det A =
    det_phase * exp(det_log).
    """

    lu: np.ndarray
    piv: np.ndarray
    n: int
    singular: bool
    det_phase: complex
    det_log: float


class SpectralExtremes(NamedTuple):
    """Estimates of the extreme eigenvalue moduli with convergence flags."""

    lo: float
    hi: float
    lo_converged: bool
    hi_converged: bool


def matmul(A: DenseMatrix, B: DenseMatrix) -> DenseMatrix:
    """C = A B for equal-dimension square matrices."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A @ B


def lu_factor(A: DenseMatrix) -> LUFactors:
    """Partial-pivoted LU. Never raises for singular input; the returned
    factor carries a singularity flag instead."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    with warnings.catch_warnings():
        # scipy warns on exactly-zero pivots; the flag below covers it
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    diag = np.diagonal(lu)
    absdiag = np.abs(diag)
    a_inf = float(np.max(np.sum(np.abs(A), axis=1))) if n else 0.0
    singular = bool(np.any(absdiag <= n * _EPS * a_inf) or np.any(absdiag == 0.0))
    swaps = int(np.count_nonzero(piv != np.arange(n)))
    phase = complex((-1.0) ** swaps)
    if singular and np.any(absdiag == 0.0):
        det_log = -math.inf
        det_phase = 0.0 + 0.0j
    else:
        det_log = float(np.sum(np.log(absdiag)))
        det_phase = phase * complex(np.prod(diag / absdiag))
    return LUFactors(
        lu=lu, piv=piv, n=n, singular=singular,
        det_phase=det_phase, det_log=det_log,
    )


def solve(F: LUFactors, B: DenseMatrix, side: str = "left") -> DenseMatrix:
    """A^{-1} B (side="left") or B A^{-1} (side="right") from the factor F.

    The right solve runs through A^T X^T = B^T (plain transpose), so A is
    never inverted explicitly.
    """
    if F.singular:
        raise SingularMatrixError("solve with a singular factor")
    B = np.asarray(B, dtype=complex)
    if side == "left":
        return scipy.linalg.lu_solve((F.lu, F.piv), B, trans=0, check_finite=False)
    if side == "right":
        Xt = scipy.linalg.lu_solve((F.lu, F.piv), B.T, trans=1, check_finite=False)
        return np.ascontiguousarray(Xt.T)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def inverse(F: LUFactors) -> DenseMatrix:
    """A^{-1} by solving against the identity."""
    if F.singular:
        raise SingularMatrixError("inverse of a singular factor")
    return solve(F, np.eye(F.n, dtype=complex), side="left")


def norm(A: DenseMatrix, kind: str = "inf") -> float:
    """Matrix norm: one (max column sum), inf (max row sum), fro, max."""
    A = np.asarray(A)
    if kind == "one":
        return float(np.max(np.sum(np.abs(A), axis=0))) if A.size else 0.0
    if kind == "inf":
        return float(np.max(np.sum(np.abs(A), axis=1))) if A.size else 0.0
    if kind == "fro":
        return float(np.linalg.norm(A, "fro"))
    if kind == "max":
        return float(np.max(np.abs(A))) if A.size else 0.0
    raise ValueError(f"unknown norm kind {kind!r}")


def _seed_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def two_norm_estimate(A: DenseMatrix, tol: float = 1e-6) -> float:
    """Largest singular value via power iteration on A*A.

    Deterministic (fixed start seed). At most 500 iterations; on
    non-convergence the best estimate is returned with a RuntimeWarning.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if n == 0:
        return 0.0
    Ah = A.conj().T
    v = _seed_vector(n, np.random.default_rng(_POWER_SEED))
    est = 0.0
    for _ in range(500):
        w = A @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        prev, est = est, nw
        if abs(est - prev) <= tol * est:
            return est
        v = Ah @ w
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            return est
        v /= nv
    warnings.warn(
        "two_norm_estimate did not converge; returning best estimate",
        RuntimeWarning,
        stacklevel=2,
    )
    return est


def extreme_eigen_moduli(A: DenseMatrix) -> SpectralExtremes:
    """(|lambda|_min, |lambda|_max) estimates: power iteration for the
    dominant modulus, inverse power iteration through an LU factor for
    the smallest. Tolerance 1e-3, at most 200 iterations each; results
    carry convergence flags. Raises for singular A."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    tol = 1e-3
    rng = np.random.default_rng(_POWER_SEED)

    v = _seed_vector(n, rng)
    hi = 0.0
    hi_converged = False
    for _ in range(200):
        w = A @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            break
        prev, hi = hi, nw
        if abs(hi - prev) <= tol * hi:
            hi_converged = True
            break
        v = w / nw

    F = lu_factor(A)
    if F.singular:
        raise SingularMatrixError("extreme_eigen_moduli requires nonsingular A")
    v = _seed_vector(n, rng)
    inv_est = 0.0
    lo_converged = False
    for _ in range(200):
        w = scipy.linalg.lu_solve((F.lu, F.piv), v, check_finite=False)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            break
        prev, inv_est = inv_est, nw
        if abs(inv_est - prev) <= tol * inv_est:
            lo_converged = True
            break
        v = w / nw
    lo = 1.0 / inv_est if inv_est > 0.0 else math.inf

    return SpectralExtremes(lo=lo, hi=hi, lo_converged=lo_converged,
                            hi_converged=hi_converged)


def det_log_magnitude(F: LUFactors) -> float:
    """log|det A| from the factor's pivot magnitudes."""
    if F.singular:
        raise SingularMatrixError("determinant of a singular factor")
    return F.det_log
