"""Coupled iterations for the principal matrix square root.

The driver scales the problem to unit spectral radius, picks the
interval parameter alpha from spectral-extreme estimates, and runs one
of three methods: the minimax rational iteration (full or alt form),
the fixed-coefficient Pade comparator, and the Denman-Beavers
comparator. States carry Y_k -> A^{1/2} and Z_k -> A^{-1/2} (for
Denman-Beavers the pair (X_k, Y_k) lives in the same two slots).

Per-step shifted factorizations are independent and run on a thread
pool when the ZOLO_THREADS environment variable allows; the
partial-fraction reduction always sums in shift order, so results are
bitwise reproducible at any thread count.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DenseMatrix,
    SingularMatrixError,
    dense,
    extreme_eigen_moduli,
    inverse,
    lu_factor,
    matmul,
    norm,
)
from . import linalg as _la
from .zolofuncs import ZoloParams, advance_alpha, pade_partial_fraction, _form_for

_EPS = 2.0 ** -53

_METHODS = ("zolotarev", "pade", "denman_beavers")
_FORMS = ("full", "alt")
_NORM_KINDS = ("one", "inf", "fro", "max")

__all__ = [
    "IterationAbortError",
    "IterationOptions",
    "IterationState",
    "ConvergenceReport",
    "prepare_problem",
    "zolo_step",
    "pade_step",
    "db_step",
    "termination_check",
    "normalized_iterates",
    "sqrtm_drive",
]


class IterationAbortError(RuntimeError):
    """A shifted system or iterate was singular; the iteration cannot proceed."""


@dataclass
class IterationOptions:
    """Method selection and tolerances for sqrtm_drive.

    ``delta`` defaults to u*sqrt(n) when left as None. ``det_scaling``
    applies to the comparator methods only; None resolves to True for
    them and False for the minimax method, which scales through its
    alpha schedule instead.
    """

    method: str = "zolotarev"
    m: int = 8
    ell: int = 8
    alpha_override: float | None = None
    form: str = "alt"
    delta: float | None = None
    max_iter: int = 20
    det_scaling: bool | None = None
    norm_kind: str = "inf"

    def __post_init__(self) -> None:
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}, got {self.method!r}")
        if self.ell not in (self.m - 1, self.m) or self.m < 1:
            raise ValueError(f"(m, ell)=({self.m}, {self.ell}) invalid")
        if self.form not in _FORMS:
            raise ValueError(f"form must be 'full' or 'alt', got {self.form!r}")
        if self.delta is not None and not (self.delta > 0.0):
            raise ValueError("delta must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.norm_kind not in _NORM_KINDS:
            raise ValueError(f"norm_kind must be one of {_NORM_KINDS}")
        if self.det_scaling and self.method == "zolotarev":
            raise ValueError(
                "det_scaling applies to comparator methods only; the minimax "
                "iteration is scaled by its alpha schedule"
            )

    def resolved_det_scaling(self) -> bool:
        if self.det_scaling is None:
            return self.method in ("pade", "denman_beavers")
        return bool(self.det_scaling)


@dataclass
class IterationState:
    """One iterate of a coupled method.

    ``prev_change`` is the relative change that produced this state,
    maintained by sqrtm_drive (inf before the first step); ``diag``
    carries step byproducts: "zy_gap" = norm of the tilde-normalized
    Z_k Y_k - I formed by a full-form step, "z_inv_norm" = norm of the
    Z_k^{-1} (or Denman-Beavers Y_k^{-1}) that an alt-form step inverted.
    """

    Y: DenseMatrix
    Z: DenseMatrix
    alpha_k: float
    k: int
    prev_change: float = math.inf
    diag: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ConvergenceReport:
    """Outcome summary: histories are aligned with iterations 1..K."""

    iterations: int
    reason: str  # criterion_satisfied | stagnation | max_iter
    alpha_history: tuple[float, ...]
    change_history: tuple[float, ...]
    residual: float
    scale: float
    alpha: float


_ALPHA_FALLBACK = 1e-8
_ALPHA_CLAMP = (1e-12, 1.0 - 1e-8)


def prepare_problem(A: DenseMatrix, opts: IterationOptions):
    """Scale A to unit estimated spectral radius and pick alpha.

    Returns (A_scaled, s, alpha) with s the |lambda|_max estimate and
    alpha = clamp(sqrt(lo/hi)) unless opts.alpha_override is given, in
    which case the override is used verbatim. Estimation non-convergence
    is downgraded to a warning with the conservative fallback alpha.
    """
    A = np.asarray(A, dtype=complex)
    ext = extreme_eigen_moduli(A)
    s = ext.hi
    if s <= 0.0:
        raise SingularMatrixError("spectral radius estimate is zero")
    if opts.alpha_override is not None:
        alpha = float(opts.alpha_override)
    elif not (ext.lo_converged and ext.hi_converged):
        warnings.warn(
            "extreme-eigenvalue estimation did not converge; "
            f"falling back to alpha = {_ALPHA_FALLBACK:g}",
            RuntimeWarning,
            stacklevel=2,
        )
        alpha = _ALPHA_FALLBACK
    else:
        alpha = min(max(math.sqrt(ext.lo / ext.hi), _ALPHA_CLAMP[0]), _ALPHA_CLAMP[1])
    return A / s, s, alpha


def _thread_count() -> int:
    env = os.environ.get("ZOLO_THREADS")
    if not env:
        return 1
    try:
        return max(int(env), 1)
    except ValueError:
        warnings.warn(
            f"ignoring non-integer ZOLO_THREADS={env!r}", RuntimeWarning, stacklevel=3
        )
        return 1


def _map_shifts(fn, count: int) -> list:
    """Apply fn to 0..count-1, possibly concurrently; results in index order."""
    workers = min(_thread_count(), count)
    if workers <= 1 or count <= 1:
        return [fn(j) for j in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, range(count)))


def _tilde_factor(alpha: float) -> float:
    return (1.0 + alpha) / (2.0 * alpha)


def zolo_step(st: IterationState, p: ZoloParams, form: str = "alt", *,
              norm_kind: str = "inf") -> IterationState:
    """One coupled minimax step of type (p.m, p.ell).

    Coefficients are evaluated at the state's alpha_k (p fixes the type;
    once alpha_k has been clamped to 1 the Pade limit coefficients are
    substituted). The full form factors the m shifted systems
    Z_k Y_k + c_j I; the alt form factors Z_k once and the m systems
    Y_k + c_j Z_k^{-1}, storing norm(Z_k^{-1}) as a byproduct.
    """
    if form not in _FORMS:
        raise ValueError(f"form must be 'full' or 'alt', got {form!r}")
    alpha = st.alpha_k
    pf = _form_for(p.m, p.ell, alpha)
    shifts = pf.shifts
    residues = pf.residues
    Y, Z = st.Y, st.Z
    n = Y.shape[0]
    eye = np.eye(n, dtype=complex)
    diag: dict = {}

    if form == "full":
        P = matmul(Z, Y)
        t2 = _tilde_factor(alpha) ** 2
        diag["zy_gap"] = norm(t2 * P - eye, norm_kind)

        def shifted_pair(j: int):
            F = lu_factor(P + shifts[j] * eye)
            if F.singular:
                raise IterationAbortError(
                    f"singular shifted system at iteration {st.k + 1}, "
                    f"shift {j + 1} (c = {shifts[j]:.6g})"
                )
            return _la.solve(F, Y, side="right"), _la.solve(F, Z, side="left")

        pairs = _map_shifts(shifted_pair, p.m)
        sum_y = sum(residues[j] * pairs[j][0] for j in range(p.m))
        sum_z = sum(residues[j] * pairs[j][1] for j in range(p.m))
        if pf.has_constant_term:
            sum_y = Y + sum_y
            sum_z = Z + sum_z
        y_new = pf.scale * sum_y
        z_new = pf.scale * sum_z
    else:
        FZ = lu_factor(Z)
        if FZ.singular:
            raise IterationAbortError(
                f"singular Z iterate at iteration {st.k + 1}"
            )
        W = inverse(FZ)
        diag["z_inv_norm"] = norm(W, norm_kind)

        def shifted_pair(j: int):
            F = lu_factor(Y + shifts[j] * W)
            if F.singular:
                raise IterationAbortError(
                    f"singular shifted system at iteration {st.k + 1}, "
                    f"shift {j + 1} (c = {shifts[j]:.6g})"
                )
            return _la.solve(F, Y, side="right"), inverse(F)

        pairs = _map_shifts(shifted_pair, p.m)
        sum_v = sum(residues[j] * pairs[j][0] for j in range(p.m))
        sum_g = sum(residues[j] * pairs[j][1] for j in range(p.m))
        y_new = matmul(sum_v, W)
        z_new = sum_g
        if pf.has_constant_term:
            y_new = Y + y_new
            z_new = Z + z_new
        y_new = pf.scale * y_new
        z_new = pf.scale * z_new

    return IterationState(
        Y=y_new, Z=z_new,
        alpha_k=advance_alpha(alpha, p.m, p.ell),
        k=st.k + 1, diag=diag,
    )


def _det_scale_factor(log_det_y: float, log_det_z: float, n: int) -> float:
    return math.exp(-(log_det_y + log_det_z) / (2.0 * n))


def pade_step(st: IterationState, m: int, ell: int,
              det_scaling: bool = False, *, norm_kind: str = "inf") -> IterationState:
    """One fixed-coefficient comparator step (the alpha -> 1 limit of the
    minimax update), optionally with determinantal scaling of Y and Z
    before the update."""
    pf = pade_partial_fraction(m, ell)
    Y, Z = st.Y, st.Z
    n = Y.shape[0]
    eye = np.eye(n, dtype=complex)
    if det_scaling:
        FY = lu_factor(Y)
        FZ = lu_factor(Z)
        if FY.singular or FZ.singular:
            raise IterationAbortError(
                f"singular iterate at iteration {st.k + 1} (determinant scaling)"
            )
        g = _det_scale_factor(FY.det_log, FZ.det_log, n)
        Y = g * Y
        Z = g * Z
    P = matmul(Z, Y)
    diag = {"zy_gap": norm(P - eye, norm_kind)}

    def shifted_pair(j: int):
        F = lu_factor(P + pf.shifts[j] * eye)
        if F.singular:
            raise IterationAbortError(
                f"singular shifted system at iteration {st.k + 1}, "
                f"shift {j + 1} (c = {pf.shifts[j]:.6g})"
            )
        return _la.solve(F, Y, side="right"), _la.solve(F, Z, side="left")

    pairs = _map_shifts(shifted_pair, m)
    sum_y = sum(pf.residues[j] * pairs[j][0] for j in range(m))
    sum_z = sum(pf.residues[j] * pairs[j][1] for j in range(m))
    if pf.has_constant_term:
        sum_y = Y + sum_y
        sum_z = Z + sum_z
    return IterationState(
        Y=pf.scale * sum_y, Z=pf.scale * sum_z,
        alpha_k=1.0, k=st.k + 1, diag=diag,
    )


def db_step(st: IterationState, det_scaling: bool = False, *,
            norm_kind: str = "inf") -> IterationState:
    """One Denman-Beavers step: X' = (X + Y^{-1})/2, Y' = (Y + X^{-1})/2,
    with X in the Y slot and the companion iterate in the Z slot.
    Determinantal scaling rescales the pair before the averaging; the
    inverses are reused, so no extra factorization is needed."""
    X, Ydb = st.Y, st.Z
    n = X.shape[0]
    FX = lu_factor(X)
    FY = lu_factor(Ydb)
    if FX.singular or FY.singular:
        raise IterationAbortError(f"singular iterate at iteration {st.k + 1}")
    x_inv = inverse(FX)
    y_inv = inverse(FY)
    diag = {"z_inv_norm": norm(y_inv, norm_kind)}
    g = _det_scale_factor(FX.det_log, FY.det_log, n) if det_scaling else 1.0
    ginv = 1.0 / g
    return IterationState(
        Y=0.5 * (g * X + ginv * y_inv),
        Z=0.5 * (g * Ydb + ginv * x_inv),
        alpha_k=1.0, k=st.k + 1, diag=diag,
    )


def normalized_iterates(st: IterationState):
    """Balanced (tilde) iterates: both fields scaled by (1+alpha_k)/(2 alpha_k)."""
    if not (0.0 < st.alpha_k <= 1.0):
        raise ValueError(f"alpha_k={st.alpha_k!r} outside (0, 1]")
    t = _tilde_factor(st.alpha_k)
    return t * st.Y, t * st.Z


def _resolved_delta(opts: IterationOptions, n: int) -> float:
    if opts.delta is not None:
        return opts.delta
    return _EPS * math.sqrt(n)


def termination_check(st: IterationState, prev: IterationState,
                      opts: IterationOptions, aux: dict) -> str:
    """Decide {continue, accept, stagnate} for the newly produced state.

    Gap-producing steps (full form, pade) are accepted when the stored
    norm of Z_{k-1} Y_{k-1} - I (tilde-normalized) is at or below
    8 (delta/4)^(1/q); difference-based steps (alt form, Denman-Beavers)
    when norm(Yt_k - Yt_{k-1}) is at or below
    (delta norm(Yt_k) / (norm(A^{-1}) norm(Zt_{k-1}^{-1})))^(1/q).
    Stagnation fires when the relative change fails to halve while both
    the current and the previous relative change sit at or below 1e-2;
    requiring the previous change to be small as well keeps the window
    from opening on the very step that first crosses 1e-2, where mid
    phase contraction ratios routinely exceed 1/2 long before the
    iteration stalls. It needs prev.prev_change (the change at k-1,
    maintained by sqrtm_drive) and is therefore inactive before k = 2.
    aux supplies norm(A^{-1}) and, when an alt-form byproduct exists,
    the raw norm(Z_{k-1}^{-1}).
    """
    kind = opts.norm_kind
    n = st.Y.shape[0]
    delta = _resolved_delta(opts, n)
    q = 2 if opts.method == "denman_beavers" else opts.m + opts.ell + 1
    use_gap = opts.method == "pade" or (
        opts.method == "zolotarev" and opts.form == "full"
    )

    yt = _tilde_factor(st.alpha_k) * st.Y
    yt_prev = _tilde_factor(prev.alpha_k) * prev.Y
    change = norm(yt - yt_prev, kind)
    size = norm(yt, kind)

    if use_gap:
        gap = st.diag.get("zy_gap")
        if gap is not None and gap <= 8.0 * (delta / 4.0) ** (1.0 / q):
            return "accept"
    else:
        z_inv = aux.get("z_inv_norm")
        a_inv = aux.get("a_inv_norm")
        if z_inv is not None and a_inv is not None:
            zt_inv = z_inv / _tilde_factor(prev.alpha_k)
            bound = (delta * size / (a_inv * zt_inv)) ** (1.0 / q)
            if change <= bound:
                return "accept"

    if size > 0.0:
        rel = change / size
        if prev.prev_change <= 1e-2 and 0.5 * prev.prev_change <= rel <= 1e-2:
            return "stagnate"
    return "continue"


def sqrtm_drive(A: DenseMatrix, opts: IterationOptions | None = None):
    """Compute X ~ A^{1/2} and Xinv ~ A^{-1/2} by the selected iteration.

    Returns (X, Xinv, report). The returned pair is tilde-normalized and
    unscaled back to the original A; the relative residual is measured
    once at exit in opts.norm_kind.
    """
    if opts is None:
        opts = IterationOptions()
    A = dense(A)
    n = A.shape[0]
    kind = opts.norm_kind
    A_scaled, s, alpha = prepare_problem(A, opts)
    sqrt_s = math.sqrt(s)

    use_gap = opts.method == "pade" or (
        opts.method == "zolotarev" and opts.form == "full"
    )
    a_inv_norm = None
    if not use_gap:
        a_inv_norm = norm(inverse(lu_factor(A_scaled)), kind)

    if opts.method == "zolotarev":
        p = ZoloParams(opts.m, opts.ell, min(alpha, 1.0 - 1e-15))
    scaling_active = opts.resolved_det_scaling()

    state = IterationState(
        Y=A_scaled.copy(), Z=np.eye(n, dtype=complex),
        alpha_k=alpha if opts.method == "zolotarev" else 1.0,
        k=0,
    )
    alpha_hist: list[float] = []
    change_hist: list[float] = []
    reason = "max_iter"

    for _ in range(opts.max_iter):
        prev = state
        if opts.method == "zolotarev":
            state = zolo_step(prev, p, opts.form, norm_kind=kind)
        elif opts.method == "pade":
            state = pade_step(prev, opts.m, opts.ell,
                              det_scaling=scaling_active, norm_kind=kind)
        else:
            state = db_step(prev, det_scaling=scaling_active, norm_kind=kind)

        yt = _tilde_factor(state.alpha_k) * state.Y
        change = norm(yt - _tilde_factor(prev.alpha_k) * prev.Y, kind)
        size = norm(yt, kind)
        state.prev_change = change / size if size > 0.0 else 0.0
        alpha_hist.append(state.alpha_k)
        change_hist.append(change)
        if scaling_active and state.prev_change < 1e-2:
            scaling_active = False
            # The first unscaled step absorbs a one-time renormalization
            # jump, so its change is not comparable to det-scaled ones.
            state.prev_change = math.inf

        aux = {"a_inv_norm": a_inv_norm,
               "z_inv_norm": state.diag.get("z_inv_norm")}
        decision = termination_check(state, prev, opts, aux)
        if decision == "accept":
            reason = "criterion_satisfied"
            break
        if decision == "stagnate":
            reason = "stagnation"
            break

    y_t, z_t = normalized_iterates(state)
    X = sqrt_s * y_t
    Xinv = z_t / sqrt_s
    residual = norm(matmul(X, X) - A, kind) / norm(A, kind)
    report = ConvergenceReport(
        iterations=state.k,
        reason=reason,
        alpha_history=tuple(alpha_hist),
        change_history=tuple(change_hist),
        residual=residual,
        scale=s,
        alpha=alpha,
    )
    return X, Xinv, report
