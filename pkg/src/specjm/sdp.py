"""Interior-point solver for small dense SDPs with Hermitian PSD blocks.

Problems are stated at the complex level: optimize ``sum_k <C_k, X_k>`` over
Hermitian PSD blocks ``X_k`` subject to linear equalities
``sum_k <A_jk, X_k> = b_j``, with ``<A, B> = Re tr[A* B]``.  The solver embeds
each Hermitian block into its real-symmetric double (:func:`realify_matrix`),
runs a homogeneous self-dual primal-dual interior-point method with
Nesterov-Todd scaling and a Mehrotra predictor-corrector step, and maps
solutions and infeasibility/unboundedness certificates back to the complex
level.

Scaling bookkeeping for the real embedding: ``tr[rho(A) rho(B)] =
2 Re tr[A B*]``, so the embedded data matrices are ``rho(.)/2`` — that halving
makes real inner products, objective values, and dual multipliers numerically
identical to their complex counterparts, with no doubling on the way back.
Real solutions are mapped back by averaging the two diagonal copies, which is
exactly the PSD-preserving projection onto embedded-complex form.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Mapping, NamedTuple

import numpy as np
import scipy.linalg

from .errors import (
    DependentConstraintWarning,
    DimensionOverflow,
    NumericalBreakdown,
)
from .linalg import hermitize, max_abs
from .serialize import matrix_from_json, matrix_to_json, require_schema, stamp

__all__ = [
    "Constraint",
    "DEFAULT_MAX_ITER",
    "DEFAULT_SIZE_CAP",
    "DEFAULT_TOL",
    "IterationRecord",
    "RealProblem",
    "SdpProblem",
    "SdpSolution",
    "SdpStatus",
    "expand_matrix_equality",
    "hermitian_basis",
    "problem_from_json",
    "problem_to_json",
    "realify",
    "realify_matrix",
    "solve",
]

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 200
DEFAULT_SIZE_CAP = 2_000_000


class SdpStatus(str, enum.Enum):
    """Terminal state of a solve."""

    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    MAX_ITER = "MaxIter"


@dataclass(frozen=True)
class Constraint:
    """One linear equality ``sum_k <coeffs[k], X_k> = rhs``.

    ``coeffs`` maps block indices to Hermitian coefficient matrices; blocks
    absent from the mapping do not enter the row.
    """

    coeffs: Mapping[int, np.ndarray]
    rhs: float


@dataclass(frozen=True)
class SdpProblem:
    """A block-diagonal Hermitian SDP in equality standard form.

    ``blocks`` lists the complex dimension of each PSD variable; ``objective``
    gives one Hermitian cost matrix per block; ``sense`` is ``"minimize"`` or
    ``"maximize"``.  Construction validates Hermiticity and dimensions and
    stores defensive read-only copies.
    """

    blocks: tuple[int, ...]
    objective: tuple[np.ndarray, ...]
    constraints: tuple[Constraint, ...]
    sense: str = "minimize"

    def __post_init__(self) -> None:
        blocks = tuple(int(d) for d in self.blocks)
        if not blocks or any(d < 1 for d in blocks):
            raise DimensionOverflow(f"block dims must be >= 1, got {blocks}")
        if self.sense not in ("minimize", "maximize"):
            raise ValueError(f"sense must be minimize|maximize, got {self.sense!r}")
        if len(self.objective) != len(blocks):
            raise DimensionOverflow(
                f"{len(self.objective)} cost matrices for {len(blocks)} blocks"
            )
        objective = tuple(
            _frozen(_check_dim(hermitize(c), blocks[k], f"cost for block {k}"))
            for k, c in enumerate(self.objective)
        )
        rows = []
        for j, con in enumerate(self.constraints):
            coeffs = {}
            for k, a in con.coeffs.items():
                k = int(k)
                if not 0 <= k < len(blocks):
                    raise DimensionOverflow(f"constraint {j} references block {k}")
                coeffs[k] = _frozen(
                    _check_dim(hermitize(a), blocks[k], f"constraint {j}, block {k}")
                )
            rows.append(Constraint(coeffs, float(con.rhs)))
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "constraints", tuple(rows))


class IterationRecord(NamedTuple):
    """Per-iteration solver telemetry (all at the un-normalized HSDE point).

    Objective values are in the solver's internal objective normalization
    (cost matrices divided by their largest magnitude), so the records are
    mutually consistent but not in the caller's cost units.
    """

    mu: float
    primal_res: float
    dual_res: float
    rel_gap: float
    primal_obj: float
    dual_obj: float
    tau: float
    kappa: float
    gap_residual: float


@dataclass(frozen=True)
class SdpSolution:
    """Result of a solve.

    At ``Optimal``, ``block_values`` are the primal blocks and ``duals`` the
    equality multipliers.  At ``Infeasible``, ``duals`` is a Farkas certificate
    ``y`` normalized to ``b.y = 1`` with ``sum_j y_j A_jk + S_k = 0`` for the
    PSD ``block_values`` ``S_k``.  At ``Unbounded``, ``block_values`` is an
    improving ray (``<A_j, X> = 0``, unit negative cost).  ``residuals`` always
    carries ``primal_eq`` (max equality violation), ``min_block_eig``, and
    ``duality_gap`` (relative), plus certificate diagnostics when relevant.
    """

    status: SdpStatus
    objective_value: float
    block_values: tuple[np.ndarray, ...]
    duals: np.ndarray
    residuals: dict[str, float]
    history: tuple[IterationRecord, ...] = field(default_factory=tuple, repr=False)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


def _check_dim(arr: np.ndarray, dim: int, what: str) -> np.ndarray:
    if arr.shape != (dim, dim):
        raise DimensionOverflow(f"{what}: shape {arr.shape}, block dim {dim}")
    return arr


# --- Hermitian basis and matrix-equality expansion ------------------------

def hermitian_basis(dim: int) -> list[np.ndarray]:
    """The standard d^2-element basis of Hermitian d x d matrices.

    Diagonal units e_ii, then for each i < j the real pair e_ij + e_ji and the
    imaginary pair i(e_ij - e_ji).  Expanding a matrix equality against this
    basis yields exactly d^2 real equality rows.
    """
    out = []
    for i in range(dim):
        m = np.zeros((dim, dim), dtype=np.complex128)
        m[i, i] = 1.0
        out.append(m)
    for i in range(dim):
        for j in range(i + 1, dim):
            m = np.zeros((dim, dim), dtype=np.complex128)
            m[i, j] = 1.0
            m[j, i] = 1.0
            out.append(m)
            m = np.zeros((dim, dim), dtype=np.complex128)
            m[i, j] = 1.0j
            m[j, i] = -1.0j
            out.append(m)
    return out


def expand_matrix_equality(
    rhs: np.ndarray,
    matrix_blocks: Mapping[int, float],
    scalar_blocks: Mapping[int, np.ndarray] | None = None,
) -> list[Constraint]:
    """Expand a Hermitian matrix equality into d^2 real constraint rows.

    Encodes ``sum_k g_k X_k + sum_l u_l D_l = rhs`` where ``matrix_blocks[k]``
    is the real coefficient ``g_k`` of a matrix block ``X_k`` (same dimension
    as ``rhs``) and ``scalar_blocks[l]`` is the fixed Hermitian matrix ``D_l``
    multiplying a 1 x 1 scalar block ``u_l``.
    """
    b = hermitize(rhs)
    dim = b.shape[0]
    scalar_blocks = scalar_blocks or {}
    fixed = {l: hermitize(_check_dim(np.asarray(d_mat, dtype=np.complex128), dim,
                                     f"scalar-block coefficient {l}"))
             for l, d_mat in scalar_blocks.items()}
    rows = []
    for f in hermitian_basis(dim):
        coeffs: dict[int, np.ndarray] = {
            k: gamma * f for k, gamma in matrix_blocks.items()
        }
        for l, d_mat in fixed.items():
            coeffs[l] = np.array([[np.real(np.trace(f @ d_mat))]], dtype=np.complex128)
        rows.append(Constraint(coeffs, float(np.real(np.trace(f @ b)))))
    return rows


# --- realification --------------------------------------------------------

def realify_matrix(matrix: np.ndarray) -> np.ndarray:
    """The real 2d x 2d embedding [[Re, -Im], [Im, Re]] of a complex matrix.

    Hermitian matrices map to symmetric ones; each eigenvalue of the input
    appears twice in the output.
    """
    arr = np.asarray(matrix, dtype=np.complex128)
    re, im = arr.real, arr.imag
    return np.block([[re, -im], [im, re]])


def _mapback(xhat: np.ndarray, dim: int) -> np.ndarray:
    """Average the two embedded copies back to a Hermitian d x d matrix.

    For symmetric input this is the adjoint-invariant projection onto the
    image of ``realify_matrix``; it preserves PSD-ness and, for embedded data,
    inner products exactly.
    """
    x11 = xhat[:dim, :dim]
    x22 = xhat[dim:, dim:]
    x21 = xhat[dim:, :dim]
    m = (x11 + x22) / 2.0 + 0.5j * (x21 - x21.T)
    return (m + m.conj().T) / 2.0


@dataclass
class _BlockGroup:
    """All blocks sharing one real dimension, stacked for batched updates."""

    dim: int                     # real (embedded) dimension
    members: tuple[int, ...]     # original block indices
    a: np.ndarray                # (m, nb, n, n) embedded constraint slices / 2
    c: np.ndarray                # (nb, n, n) embedded cost slices / 2


@dataclass
class RealProblem:
    """Internal real-symmetric form of an :class:`SdpProblem`.

    Data matrices are the halved embeddings ``rho(.)/2`` so every inner
    product, objective value, and dual multiplier coincides numerically with
    the complex problem; ``flip`` records a maximize sense (the stored
    objective is already negated to minimize form).
    """

    groups: list[_BlockGroup]
    b: np.ndarray
    nu: float
    flip: bool
    nblocks: int


def realify(problem: SdpProblem) -> RealProblem:
    """Embed a complex Hermitian SDP as a real symmetric one (minimize form)."""
    sign = -1.0 if problem.sense == "maximize" else 1.0
    m = len(problem.constraints)
    order: dict[int, list[int]] = {}
    for k, d in enumerate(problem.blocks):
        order.setdefault(2 * d, []).append(k)
    groups = []
    for n in sorted(order):
        members = tuple(order[n])
        nb = len(members)
        c = np.zeros((nb, n, n))
        a = np.zeros((m, nb, n, n))
        pos = {k: i for i, k in enumerate(members)}
        for k in members:
            c[pos[k]] = sign * realify_matrix(problem.objective[k]) / 2.0
        for j, con in enumerate(problem.constraints):
            for k, mat in con.coeffs.items():
                if k in pos:
                    a[j, pos[k]] = realify_matrix(mat) / 2.0
        groups.append(_BlockGroup(dim=n, members=members, a=a, c=c))
    b = np.array([con.rhs for con in problem.constraints], dtype=np.float64)
    nu = float(sum(g.dim * len(g.members) for g in groups))
    return RealProblem(groups=groups, b=b, nu=nu,
                       flip=problem.sense == "maximize",
                       nblocks=len(problem.blocks))


# --- svec (only used for rank preprocessing) ------------------------------

def _svec_rows(a: np.ndarray) -> np.ndarray:
    """svec of a stack (..., n, n) of symmetric matrices, off-diag * sqrt(2)."""
    n = a.shape[-1]
    iu, ju = np.triu_indices(n)
    w = np.where(iu == ju, 1.0, math.sqrt(2.0))
    return a[..., iu, ju] * w


def _drop_dependent_rows(
    real: RealProblem, tol: float
) -> tuple[np.ndarray, np.ndarray | None]:
    """Find a maximal independent row set; detect inconsistent dependencies.

    Returns ``(kept_row_indices, farkas_certificate_or_None)``.  A non-None
    certificate ``y`` satisfies ``A^T y = 0`` exactly (to least-squares
    precision) with ``b . y = 1`` — the constraint rows alone are
    contradictory, before any PSD structure enters.
    """
    m = real.b.size
    if m == 0:
        return np.arange(0), None
    amat = np.hstack([
        _svec_rows(g.a).reshape(m, -1) for g in real.groups
    ])
    _, rmat, piv = scipy.linalg.qr(amat.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(rmat)) if rmat.size else np.zeros(0)
    top = diag[0] if diag.size else 0.0
    if top == 0.0:
        rank = 0
    else:
        cutoff = max(amat.shape) * np.finfo(float).eps * top
        cutoff = max(cutoff, 1e-13 * top)
        rank = int(np.count_nonzero(diag > cutoff))
    if rank == m:
        return np.arange(m), None
    x0, *_ = np.linalg.lstsq(amat, real.b, rcond=None)
    resid = real.b - amat @ x0
    bscale = 1.0 + float(np.max(np.abs(real.b), initial=0.0))
    if float(np.max(np.abs(resid), initial=0.0)) <= max(tol, 1e-10) * bscale:
        kept = np.sort(piv[:rank])
        warnings.warn(
            f"dropped {m - rank} linearly dependent constraint row(s)",
            DependentConstraintWarning,
            stacklevel=3,
        )
        return kept, None
    y = resid / float(real.b @ resid)
    return np.arange(m), y


# --- the interior-point iteration -----------------------------------------

class _Point:
    """One HSDE iterate: per-group stacked X, S plus (y, tau, kappa)."""

    def __init__(self, x: list[np.ndarray], s: list[np.ndarray],
                 y: np.ndarray, tau: float, kappa: float):
        self.x = x
        self.s = s
        self.y = y
        self.tau = tau
        self.kappa = kappa

    def copy(self) -> "_Point":
        return _Point([x.copy() for x in self.x], [s.copy() for s in self.s],
                      self.y.copy(), self.tau, self.kappa)


class _Direction(NamedTuple):
    dx: list[np.ndarray]
    ds: list[np.ndarray]
    dy: np.ndarray
    dtau: float
    dkappa: float
    dx_scaled: list[np.ndarray]
    ds_scaled: list[np.ndarray]


def _sym(stack: np.ndarray) -> np.ndarray:
    return (stack + stack.transpose(0, 2, 1)) / 2.0


def solve(
    problem: SdpProblem,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    size_cap: int = DEFAULT_SIZE_CAP,
) -> SdpSolution:
    """Solve a block-diagonal Hermitian SDP.

    Returns a solution whose status is ``Optimal`` (residual invariants met),
    ``Infeasible`` / ``Unbounded`` (with certificates in ``duals`` /
    ``block_values``), or ``MaxIter`` (best iterate reached).  Linearly
    dependent equality rows are detected up front and dropped with a
    :class:`DependentConstraintWarning`; their multipliers are reported as 0.
    Raises :class:`NumericalBreakdown` if an internal factorization fails.
    """
    if sum(d * d for d in problem.blocks) > size_cap:
        raise DimensionOverflow(
            f"total variable size {sum(d * d for d in problem.blocks)} exceeds cap {size_cap}"
        )
    real = realify(problem)
    total_rows = real.b.size
    kept, farkas = _drop_dependent_rows(real, tol)
    if farkas is not None:
        return _inconsistent_rows_solution(problem, farkas)
    if kept.size != total_rows:
        real = RealProblem(
            groups=[
                _BlockGroup(g.dim, g.members, g.a[kept], g.c) for g in real.groups
            ],
            b=real.b[kept],
            nu=real.nu,
            flip=real.flip,
            nblocks=real.nblocks,
        )
    solution = _solve_real(problem, real, kept, total_rows, tol, max_iter)
    return solution


def _inconsistent_rows_solution(problem: SdpProblem, y: np.ndarray) -> SdpSolution:
    sign = -1.0 if problem.sense == "maximize" else 1.0
    zeros = tuple(np.zeros((d, d), dtype=np.complex128) for d in problem.blocks)
    return SdpSolution(
        status=SdpStatus.INFEASIBLE,
        objective_value=sign * math.inf,
        block_values=zeros,
        duals=sign * y,
        residuals={
            "primal_eq": math.inf,
            "min_block_eig": 0.0,
            "duality_gap": math.inf,
            "certificate_objective": 1.0,
            "certificate_residual": 0.0,
        },
        history=(),
    )


def _solve_real(
    problem: SdpProblem,
    real: RealProblem,
    kept: np.ndarray,
    total_rows: int,
    tol: float,
    max_iter: int,
) -> SdpSolution:
    groups = real.groups
    b = real.b
    m = b.size
    nu = real.nu
    bnorm = float(np.max(np.abs(b), initial=0.0))
    cnorm = max(max_abs(g.c) if g.c.size else 0.0 for g in groups)
    # Normalize the objective internally so the iterate sequence is invariant
    # under C -> c*C (same argmin to rounding); results are reported back in
    # the caller's units via obj_scale.
    obj_scale = cnorm if cnorm > 0.0 else 1.0
    if obj_scale != 1.0:
        groups = [
            _BlockGroup(g.dim, g.members, g.a, g.c / obj_scale) for g in groups
        ]
        cnorm = 1.0

    def apply_a(x: list[np.ndarray]) -> np.ndarray:
        out = np.zeros(m)
        for g, xg in zip(groups, x):
            out += np.einsum("jkab,kab->j", g.a, xg, optimize=True)
        return out

    def apply_at(y: np.ndarray) -> list[np.ndarray]:
        return [np.einsum("jkab,j->kab", g.a, y, optimize=True) for g in groups]

    def inner_c(x: list[np.ndarray]) -> float:
        return float(sum(np.einsum("kab,kab->", g.c, xg) for g, xg in zip(groups, x)))

    def inner_blocks(x: list[np.ndarray], s: list[np.ndarray]) -> float:
        return float(sum(np.einsum("kab,kab->", xg, sg) for xg, sg in zip(x, s)))

    point = _Point(
        x=[np.tile(np.eye(g.dim), (len(g.members), 1, 1)) for g in groups],
        s=[np.tile(np.eye(g.dim), (len(g.members), 1, 1)) for g in groups],
        y=np.zeros(m),
        tau=1.0,
        kappa=1.0,
    )
    history: list[IterationRecord] = []
    best: tuple[float, _Point] | None = None
    stall = 0
    prev_merit = math.inf

    def breakdown(msg: str) -> NumericalBreakdown:
        return NumericalBreakdown(msg, iterate=_iterate_summary(problem, real, point))

    for iteration in range(max_iter + 1):
        tau, kappa = point.tau, point.kappa
        ax = apply_a(point.x)
        aty = apply_at(point.y)
        rp = ax - tau * b
        rd = [aty_g + sg - tau * cg
              for aty_g, sg, cg in zip(aty, point.s, (g.c for g in groups))]
        cx = inner_c(point.x)
        by = float(b @ point.y)
        rg = by - cx - kappa
        gap_inner = inner_blocks(point.x, point.s)
        mu = (gap_inner + tau * kappa) / (nu + 1.0)

        pobj = cx / tau
        dobj = by / tau
        pres = float(np.max(np.abs(rp), initial=0.0)) / (tau * (1.0 + bnorm))
        dres = max(
            (float(np.max(np.abs(r))) if r.size else 0.0) for r in rd
        ) / (tau * (1.0 + cnorm))
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        history.append(IterationRecord(mu, pres, dres, relgap, pobj, dobj,
                                       tau, kappa, rg))

        merit = max(pres, dres, relgap)
        if best is None or merit < best[0]:
            best = (merit, point.copy())

        gap_bar = max(10.0 * tol, 1e-12)
        # The Optimal contract promises an absolute equality violation of at
        # most 1e-8, so the relative test alone is not enough when ||b|| >> 1.
        abs_viol = float(np.max(np.abs(rp), initial=0.0)) / tau
        viol_bar = max(9.0e-9, tol)
        if (pres <= tol and dres <= tol and relgap <= gap_bar
                and abs_viol <= viol_bar):
            return _optimal_solution(problem, real, kept, total_rows, point,
                                     history, obj_scale)
        if merit > 0.9 * prev_merit:
            stall += 1
        else:
            stall = 0
        prev_merit = merit
        if (stall >= 8 and pres <= 1e-8 and dres <= 1e-8 and relgap <= 1e-7
                and abs_viol <= viol_bar):
            return _optimal_solution(problem, real, kept, total_rows, point,
                                     history, obj_scale)

        if by > max(tol, 1e-12):
            cert_res = max(
                (float(np.max(np.abs(aty_g + sg))) if sg.size else 0.0)
                for aty_g, sg in zip(aty, point.s)
            ) / by
            if cert_res <= 1e-9 * (1.0 + cnorm):
                return _infeasible_solution(problem, real, kept, total_rows,
                                            point, by, history)
        if cx < -max(tol, 1e-12):
            ray_res = float(np.max(np.abs(ax), initial=0.0)) / (-cx)
            if ray_res <= 1e-9 * (1.0 + bnorm):
                return _unbounded_solution(problem, real, kept, total_rows,
                                           point, -cx * obj_scale, history)
        if tau <= 1e-12 * max(1.0, kappa):
            raise breakdown("homogeneous model collapsed without a clean certificate")
        if iteration == max_iter:
            break

        # Nesterov-Todd scaling per group.
        try:
            lx = [np.linalg.cholesky(xg) for xg in point.x]
            ls = [np.linalg.cholesky(sg) for sg in point.s]
        except np.linalg.LinAlgError as exc:
            raise breakdown(f"Cholesky of iterate failed: {exc}") from exc
        r_list, rinv_list, w_list, lam_list = [], [], [], []
        for lxg, lsg in zip(lx, ls):
            prod = np.einsum("kba,kbc->kac", lsg, lxg)
            try:
                u, lam, vt = np.linalg.svd(prod)
            except np.linalg.LinAlgError as exc:
                raise breakdown(f"SVD in NT scaling failed: {exc}") from exc
            lam = np.maximum(lam, 1e-150)
            v = vt.transpose(0, 2, 1)
            r = (lxg @ v) / np.sqrt(lam)[:, None, :]
            lxinv = np.linalg.inv(lxg)
            rinv = np.sqrt(lam)[:, :, None] * (vt @ lxinv)
            r_list.append(r)
            rinv_list.append(rinv)
            w_list.append(r @ r.transpose(0, 2, 1))
            lam_list.append(lam)

        def congru(mats: list[np.ndarray], outer: list[np.ndarray]) -> list[np.ndarray]:
            return [o @ mg @ o.transpose(0, 2, 1) for o, mg in zip(outer, mats)]

        def apply_w(mats: list[np.ndarray]) -> list[np.ndarray]:
            return [w @ mg @ w for w, mg in zip(w_list, mats)]

        # Schur complement G = A W(.)W A^T over all groups.
        gmat = np.zeros((m, m))
        for g, w in zip(groups, w_list):
            waw = np.einsum("kab,jkbc,kcd->jkad", w, g.a, w, optimize=True)
            gmat += np.einsum("jkab,lkab->jl", waw, g.a, optimize=True)
        gmat = (gmat + gmat.T) / 2.0
        chol = None
        if m:
            shift = 0.0
            base = max(np.trace(gmat) / m, 1e-30)
            for attempt in range(4):
                try:
                    chol = scipy.linalg.cho_factor(
                        gmat + shift * np.eye(m), lower=True)
                    break
                except scipy.linalg.LinAlgError:
                    shift = base * (1e-14 if shift == 0.0 else 0.0) + shift * 100.0
            if chol is None:
                raise breakdown("Schur complement factorization failed")

        def schur_solve(rhs: np.ndarray) -> np.ndarray:
            if m == 0:
                return np.zeros(0)
            return scipy.linalg.cho_solve(chol, rhs)

        hw_c = apply_w([g.c for g in groups])
        q1 = apply_a(hw_c) + b
        y1 = schur_solve(q1)
        aty1 = apply_at(y1)
        dx1 = [w @ atg @ w - hw for hw, w, atg in zip(hw_c, w_list, aty1)]
        ds1 = [cg - atg for cg, atg in zip((g.c for g in groups), aty1)]

        def newton(rhs_rp, rhs_rd, rhs_rg, rhs_comp, rhs_tk) -> _Direction:
            kmat = [
                r @ (gamma * rc) @ r.transpose(0, 2, 1)
                for r, gamma, rc in zip(
                    r_list,
                    (2.0 / (lam[:, :, None] + lam[:, None, :]) for lam in lam_list),
                    rhs_comp,
                )
            ]
            core = [km - w @ rr @ w for km, w, rr in zip(kmat, w_list, rhs_rd)]
            y0 = schur_solve(rhs_rp - apply_a(core))
            aty0 = apply_at(y0)
            dx0 = [cg + w @ atg @ w for cg, w, atg in zip(core, w_list, aty0)]
            ds0 = [rr - atg for rr, atg in zip(rhs_rd, aty0)]
            den = float(b @ y1) - inner_c(dx1) + kappa / tau
            num = rhs_rg - float(b @ y0) + inner_c(dx0) + rhs_tk / tau
            if den == 0.0:
                raise breakdown("singular tau elimination")
            dtau = num / den
            dy = y0 + dtau * y1
            dx = [a0 + dtau * a1 for a0, a1 in zip(dx0, dx1)]
            ds = [a0 + dtau * a1 for a0, a1 in zip(ds0, ds1)]
            dkappa = (rhs_tk - kappa * dtau) / tau
            dx_sc = [_sym(ri @ dxg @ ri.transpose(0, 2, 1))
                     for ri, dxg in zip(rinv_list, dx)]
            ds_sc = [_sym(r.transpose(0, 2, 1) @ dsg @ r)
                     for r, dsg in zip(r_list, ds)]
            return _Direction(dx, ds, dy, dtau, dkappa, dx_sc, ds_sc)

        def max_step(direction: _Direction) -> float:
            alpha = math.inf
            for lam, dxs, dss in zip(lam_list, direction.dx_scaled,
                                     direction.ds_scaled):
                root = np.sqrt(lam)
                scale = root[:, :, None] * root[:, None, :]
                for mats in (dxs, dss):
                    try:
                        wmin = np.linalg.eigvalsh(mats / scale)[:, 0]
                    except np.linalg.LinAlgError as exc:
                        raise breakdown(f"step-length eigensolve failed: {exc}") from exc
                    worst = float(np.min(wmin))
                    if worst < 0.0:
                        alpha = min(alpha, -1.0 / worst)
            if direction.dtau < 0.0:
                alpha = min(alpha, -tau / direction.dtau)
            if direction.dkappa < 0.0:
                alpha = min(alpha, -kappa / direction.dkappa)
            return alpha

        neg_lam2 = [
            _diag_stack(-lam * lam, g.dim) for lam, g in zip(lam_list, groups)
        ]
        affine = newton(-rp, [-r for r in rd], -rg, neg_lam2, -tau * kappa)
        alpha_aff = min(1.0, 0.99 * max_step(affine))
        mu_aff = (
            inner_blocks(
                [xg + alpha_aff * dxg for xg, dxg in zip(point.x, affine.dx)],
                [sg + alpha_aff * dsg for sg, dsg in zip(point.s, affine.ds)],
            )
            + (tau + alpha_aff * affine.dtau) * (kappa + alpha_aff * affine.dkappa)
        ) / (nu + 1.0)
        sigma = min(1.0, max(0.0, (mu_aff / mu)) ** 3)

        eta = 1.0 - sigma
        comp = []
        for lam, g, dxs, dss in zip(lam_list, groups, affine.dx_scaled,
                                    affine.ds_scaled):
            corr = (dxs @ dss + dss @ dxs) / 2.0
            target = _diag_stack(sigma * mu - lam * lam, g.dim)
            comp.append(target - corr)
        rhs_tk = sigma * mu - tau * kappa - affine.dtau * affine.dkappa
        combined = newton(-eta * rp, [-eta * r for r in rd], -eta * rg, comp, rhs_tk)
        alpha = min(1.0, 0.99 * max_step(combined))

        point = _Point(
            x=[_sym(xg + alpha * dxg) for xg, dxg in zip(point.x, combined.dx)],
            s=[_sym(sg + alpha * dsg) for sg, dsg in zip(point.s, combined.ds)],
            y=point.y + alpha * combined.dy,
            tau=tau + alpha * combined.dtau,
            kappa=kappa + alpha * combined.dkappa,
        )

    assert best is not None
    return _finalize(problem, real, kept, total_rows, best[1], history,
                     SdpStatus.MAX_ITER, obj_scale)


def _diag_stack(values: np.ndarray, dim: int) -> np.ndarray:
    """Stack (nb, n) eigenvalue rows into (nb, n, n) diagonal matrices."""
    nb = values.shape[0]
    out = np.zeros((nb, dim, dim))
    idx = np.arange(dim)
    out[:, idx, idx] = values
    return out


# --- solution assembly ----------------------------------------------------

def _ungroup(real: RealProblem, mats: list[np.ndarray],
             scale: float) -> tuple[np.ndarray, ...]:
    """Map per-group real stacks back to complex blocks in original order."""
    out: list[np.ndarray | None] = [None] * real.nblocks
    for g, stack in zip(real.groups, mats):
        d = g.dim // 2
        for pos, k in enumerate(g.members):
            out[k] = _mapback(stack[pos] * scale, d)
    return tuple(m for m in out if m is not None)


def _scatter_duals(y: np.ndarray, kept: np.ndarray, total_rows: int) -> np.ndarray:
    full = np.zeros(total_rows)
    full[kept] = y
    return full


def _complex_residuals(problem: SdpProblem, blocks: tuple[np.ndarray, ...],
                       pobj: float, dobj: float) -> dict[str, float]:
    viol = 0.0
    for con in problem.constraints:
        val = sum(
            float(np.real(np.sum(np.conj(con.coeffs[k]) * blocks[k])))
            for k in con.coeffs
        )
        viol = max(viol, abs(val - con.rhs))
    min_eig = min(
        float(np.linalg.eigvalsh((blk + blk.conj().T) / 2.0)[0]) for blk in blocks
    )
    relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
    return {"primal_eq": viol, "min_block_eig": min_eig, "duality_gap": relgap}


def _optimal_solution(problem, real, kept, total_rows, point, history,
                      obj_scale=1.0):
    return _finalize(problem, real, kept, total_rows, point, history,
                     SdpStatus.OPTIMAL, obj_scale)


def _kkt_slacks(problem, duals, sign):
    """Dual slack blocks S_k = sign * (C_k - sum_j y_j A_jk), PSD at a KKT point."""
    slacks = []
    for k, c in enumerate(problem.objective):
        s = c.astype(np.complex128, copy=True)
        for j, con in enumerate(problem.constraints):
            if k in con.coeffs and duals[j] != 0.0:
                s = s - duals[j] * con.coeffs[k]
        slacks.append(sign * s)
    return slacks


def _primal_violation(problem, blocks):
    return max(
        (abs(sum(
            float(np.real(np.sum(np.conj(con.coeffs[k]) * blocks[k])))
            for k in con.coeffs
        ) - con.rhs) for con in problem.constraints),
        default=0.0,
    )


def _polish_kkt(problem, blocks, duals, sign, free_rows):
    """Refine a converged solution to its exact KKT point by Gauss-Newton.

    The last interior-point steps solve severely ill-conditioned systems, so
    the returned iterate carries noise well above the duality-gap accuracy.
    Under strict complementarity the KKT point is locally unique; writing
    X_k = W_k W_k* at the rank read off the primal spectrum and driving the
    residuals (A(X) - b, S(y) W) to zero with a few Gauss-Newton steps snaps
    both the blocks and the multipliers onto it, making the reported argmin
    reproducible far beyond solver accuracy.  The refinement is kept only if
    it preserves the objective and improves the residuals; on any doubt the
    raw iterate is returned unchanged.  Multipliers of rows outside
    ``free_rows`` (dropped dependent constraints) are never touched, so they
    stay exactly zero.
    """
    m = len(problem.constraints)
    free_rows = np.asarray(free_rows, dtype=int)
    colmap = {int(j): i for i, j in enumerate(free_rows)}
    ws = []
    for x in blocks:
        lam, vec = np.linalg.eigh(x)
        top = float(lam[-1]) if lam.size else 0.0
        if top <= 1e-10:
            ws.append(np.zeros((x.shape[0], 0), dtype=np.complex128))
            continue
        keep = lam > 1e-5 * top
        ws.append(vec[:, keep] * np.sqrt(np.clip(lam[keep], 0.0, None)))
    nw = [2 * w.shape[0] * w.shape[1] for w in ws]
    if sum(nw) == 0:
        return blocks, duals
    rhs_scale = 1.0 + max((abs(con.rhs) for con in problem.constraints),
                          default=0.0)
    slack_scale = 1.0 + max(
        (max_abs(s) for s in _kkt_slacks(problem, duals, sign)), default=0.0)

    y = np.asarray(duals, dtype=float).copy()

    def residual(ws_cur, y_cur):
        xs = [w @ w.conj().T for w in ws_cur]
        slacks = _kkt_slacks(problem, y_cur, sign)
        parts = [np.array([
            sum(float(np.real(np.sum(np.conj(con.coeffs[k]) * xs[k])))
                for k in con.coeffs) - con.rhs
            for con in problem.constraints
        ])]
        for s, w in zip(slacks, ws_cur):
            sw = s @ w
            parts.append(sw.real.ravel())
            parts.append(sw.imag.ravel())
        return np.concatenate(parts), xs, slacks

    for _ in range(12):
        f, xs, slacks = residual(ws, y)
        if float(np.max(np.abs(f), initial=0.0)) < 1e-13 * rhs_scale:
            break
        ncols = sum(nw) + free_rows.size
        jac = np.zeros((f.size, ncols))
        # equality rows: d<A, WW*>/dW = 2 A W, split into Re/Im parts
        col = 0
        offsets = []
        for k, w in enumerate(ws):
            offsets.append(col)
            col += nw[k]
        for j, con in enumerate(problem.constraints):
            for k in con.coeffs:
                w = ws[k]
                if w.size == 0:
                    continue
                aw = 2.0 * (con.coeffs[k] @ w)
                jac[j, offsets[k]:offsets[k] + nw[k] // 2] = aw.real.ravel()
                jac[j, offsets[k] + nw[k] // 2:offsets[k] + nw[k]] = (
                    aw.imag.ravel())
        # slack rows: d(S W) = S dW - sum_j dy_j sign * A_j W
        row = m
        for k, (s, w) in enumerate(zip(slacks, ws)):
            d, r = w.shape
            if r == 0:
                continue
            nre = d * r
            block_rows = 2 * nre
            # derivative in W: Re/Im of S @ dW for unit directions
            for a in range(d):
                sa = s[:, a]
                for bcol in range(r):
                    cre = offsets[k] + a * r + bcol
                    cim = offsets[k] + nre + a * r + bcol
                    idx = np.arange(d) * r + bcol
                    jac[row + idx, cre] = sa.real
                    jac[row + nre + idx, cre] = sa.imag
                    jac[row + idx, cim] = -sa.imag
                    jac[row + nre + idx, cim] = sa.real
            for j, con in enumerate(problem.constraints):
                ci = colmap.get(j)
                if ci is not None and k in con.coeffs:
                    g = -sign * (con.coeffs[k] @ w)
                    jac[row:row + nre, sum(nw) + ci] = g.real.ravel()
                    jac[row + nre:row + block_rows, sum(nw) + ci] = (
                        g.imag.ravel())
            row += block_rows
        # rank-1 factors carry a unitary gauge freedom, so the Jacobian has
        # exact null directions; truncate them well above noise level so the
        # least-squares step stays inside the quadratic convergence basin.
        step = np.linalg.lstsq(jac, -f, rcond=1e-8)[0]
        col = 0
        new_ws = []
        for w in ws:
            d, r = w.shape
            nre = d * r
            dre = step[col:col + nre].reshape(d, r)
            dim = step[col + nre:col + 2 * nre].reshape(d, r)
            new_ws.append(w + dre + 1j * dim)
            col += 2 * nre
        ws = new_ws
        y[free_rows] = y[free_rows] + step[col:]

    f, xs, slacks = residual(ws, y)
    candidate = tuple((x + x.conj().T) / 2.0 for x in xs)
    viol0 = _primal_violation(problem, blocks)
    viol1 = _primal_violation(problem, candidate)
    obj0 = float(sum(np.real(np.sum(np.conj(c) * b))
                     for c, b in zip(problem.objective, blocks)))
    obj1 = float(sum(np.real(np.sum(np.conj(c) * b))
                     for c, b in zip(problem.objective, candidate)))
    slack_ok = all(
        float(np.linalg.eigvalsh((s + s.conj().T) / 2.0)[0]) >= -1e-7 * slack_scale
        for s in slacks if s.size
    )
    if (float(np.max(np.abs(f), initial=0.0)) <= 1e-9 * max(rhs_scale, slack_scale)
            and viol1 <= max(viol0, 1e-11)
            and abs(obj1 - obj0) <= 5e-8 * (1.0 + abs(obj0))
            and slack_ok):
        return candidate, y
    return blocks, duals


def _finalize(problem, real, kept, total_rows, point, history, status,
              obj_scale=1.0):
    sign = -1.0 if real.flip else 1.0
    blocks = _ungroup(real, point.x, 1.0 / point.tau)
    duals = sign * _scatter_duals(obj_scale * point.y / point.tau, kept,
                                  total_rows)
    if status is SdpStatus.OPTIMAL:
        blocks, duals = _polish_kkt(problem, blocks, duals, sign, kept)
    pobj = sign * float(sum(
        np.real(np.sum(np.conj(c) * x))
        for c, x in zip(problem.objective, blocks)
    ))
    bvec = np.array([con.rhs for con in problem.constraints])
    dobj = sign * float(bvec @ duals)
    residuals = _complex_residuals(problem, blocks, pobj, dobj)
    return SdpSolution(
        status=status,
        objective_value=sign * pobj,
        block_values=blocks,
        duals=duals,
        residuals=residuals,
        history=tuple(history),
    )


def _infeasible_solution(problem, real, kept, total_rows, point, by, history):
    sign = -1.0 if real.flip else 1.0
    slack = _ungroup(real, [2.0 * sg for sg in point.s], 1.0 / by)
    ycert = point.y / by
    full_y = _scatter_duals(ycert, kept, total_rows)
    # certificate residual at the complex level: || sum_j y_j A_jk + S_k ||
    accum = [np.zeros((d, d), dtype=np.complex128) for d in problem.blocks]
    for j, con in enumerate(problem.constraints):
        for k, mat in con.coeffs.items():
            accum[k] = accum[k] + full_y[j] * mat
    cert_res = max(
        max_abs(acc + slk) for acc, slk in zip(accum, slack)
    )
    return SdpSolution(
        status=SdpStatus.INFEASIBLE,
        objective_value=sign * math.inf,
        block_values=slack,
        duals=sign * full_y,
        residuals={
            "primal_eq": math.inf,
            "min_block_eig": min(
                float(np.linalg.eigvalsh(s)[0]) for s in slack
            ),
            "duality_gap": math.inf,
            "certificate_objective": 1.0,
            "certificate_residual": cert_res,
        },
        history=tuple(history),
    )


def _unbounded_solution(problem, real, kept, total_rows, point, neg_cx, history):
    sign = -1.0 if real.flip else 1.0
    ray = _ungroup(real, point.x, 1.0 / neg_cx)
    ray_res = max(
        abs(sum(
            float(np.real(np.sum(np.conj(con.coeffs[k]) * ray[k])))
            for k in con.coeffs
        ) - 0.0)
        for con in problem.constraints
    ) if problem.constraints else 0.0
    return SdpSolution(
        status=SdpStatus.UNBOUNDED,
        objective_value=-sign * math.inf,
        block_values=ray,
        duals=np.zeros(total_rows),
        residuals={
            "primal_eq": ray_res,
            "min_block_eig": min(
                float(np.linalg.eigvalsh(r)[0]) for r in ray
            ),
            "duality_gap": math.inf,
            "certificate_objective": 1.0,
            "certificate_residual": ray_res,
        },
        history=tuple(history),
    )


def _iterate_summary(problem: SdpProblem, real: RealProblem, point: _Point) -> dict:
    return {
        "tau": point.tau,
        "kappa": point.kappa,
        "y": point.y.copy(),
        "blocks": _ungroup(real, point.x, 1.0),
        "dual_blocks": _ungroup(real, [2.0 * s for s in point.s], 1.0),
    }


# --- JSON dump/load -------------------------------------------------------

def problem_to_json(problem: SdpProblem) -> dict[str, Any]:
    """Encode an SdpProblem for regression capture."""
    return stamp({
        "blocks": list(problem.blocks),
        "sense": problem.sense,
        "objective": [matrix_to_json(c) for c in problem.objective],
        "constraints": [
            {
                "rhs": con.rhs,
                "coeffs": {str(k): matrix_to_json(a) for k, a in con.coeffs.items()},
            }
            for con in problem.constraints
        ],
    })


def problem_from_json(document: Mapping[str, Any]) -> SdpProblem:
    """Decode a problem written by :func:`problem_to_json`."""
    require_schema(document)
    constraints = tuple(
        Constraint(
            coeffs={int(k): matrix_from_json(a) for k, a in row["coeffs"].items()},
            rhs=float(row["rhs"]),
        )
        for row in document["constraints"]
    )
    return SdpProblem(
        blocks=tuple(int(d) for d in document["blocks"]),
        objective=tuple(matrix_from_json(c) for c in document["objective"]),
        constraints=constraints,
        sense=document.get("sense", "minimize"),
    )
