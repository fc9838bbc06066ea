"""Vectorized NumPy implementation of the deterministic Jacobi eigensolver.

The algorithm is a cyclic Jacobi iteration for dense Hermitian matrices: each
sweep visits every off-diagonal pair once, following the fixed round-robin
schedule from :mod:`specjm._schedule`.  All pivots within a round are
disjoint, so their rotations commute exactly and can be applied as one batch
of row/column operations — that is what makes this pure-Python fallback fast
enough to stand in for the compiled core.

For a pivot (p, q) with a_pq = r·u (r = |a_pq|, |u| = 1) the annihilating
unitary acts on columns as

    col_p ← c·col_p − s·conj(u)·col_q,   col_q ← s·col_p + c·conj(u)·col_q

with the classic stable rotation parameters

    τ = (a_qq − a_pp) / (2r),   t = sign(τ) / (|τ| + sqrt(1 + τ²)),
    c = 1 / sqrt(1 + t²),       s = t·c.
"""

from __future__ import annotations

import numpy as np

from ._schedule import round_robin_rounds
from .errors import ConvergenceFailure

BACKEND_NAME = "python"

_index_cache: dict[int, tuple[tuple[np.ndarray, np.ndarray], ...]] = {}


def _round_indices(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    rounds = _index_cache.get(n)
    if rounds is None:
        rounds = tuple(
            (
                np.array([p for p, _ in rnd], dtype=np.intp),
                np.array([q for _, q in rnd], dtype=np.intp),
            )
            for rnd in round_robin_rounds(n)
        )
        _index_cache[n] = rounds
    return rounds


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diagonal(a))
    return float(np.linalg.norm(off))


def jacobi_eigh(
    matrix: np.ndarray,
    tol: float = 1e-14,
    max_sweeps: int = 60,
) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize a Hermitian matrix; return (eigenvalues, eigenvectors).

    Eigenvalues come back ascending; eigenvector k is ``vectors[:, k]``.
    ``tol`` is relative to the Frobenius norm of the input.  Raises
    :class:`ConvergenceFailure` if the off-diagonal mass has not dropped
    below the threshold after ``max_sweeps`` sweeps.
    """
    a = np.array(matrix, dtype=np.complex128)
    n = a.shape[0]
    if n == 1:
        return a.real.reshape(1).copy(), np.ones((1, 1), dtype=np.complex128)

    vectors = np.eye(n, dtype=np.complex128)
    scale = float(np.linalg.norm(a))
    threshold = tol * max(scale, np.finfo(float).tiny)

    for _ in range(max_sweeps):
        if _offdiag_norm(a) <= threshold:
            break
        for ps, qs in _round_indices(n):
            apq = a[ps, qs]
            r = np.abs(apq)
            active = r > 0.0
            safe_r = np.where(active, r, 1.0)
            u = np.where(active, apq / safe_r, 1.0 + 0.0j)
            app = a[ps, ps].real
            aqq = a[qs, qs].real
            tau = (aqq - app) / (2.0 * safe_r)
            t = np.copysign(1.0, tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            c = np.where(active, c, 1.0)
            s = np.where(active, s, 0.0)

            uc = np.conj(u)
            # columns:  A ← A·Q
            col_p = a[:, ps]
            col_q = a[:, qs]
            a[:, ps] = c * col_p - (s * uc) * col_q
            a[:, qs] = s * col_p + (c * uc) * col_q
            # rows:  A ← Q*·A
            row_p = a[ps, :]
            row_q = a[qs, :]
            a[ps, :] = c[:, None] * row_p - (s * u)[:, None] * row_q
            a[qs, :] = s[:, None] * row_p + (c * u)[:, None] * row_q
            # accumulate eigenvectors:  V ← V·Q
            v_p = vectors[:, ps]
            v_q = vectors[:, qs]
            vectors[:, ps] = c * v_p - (s * uc) * v_q
            vectors[:, qs] = s * v_p + (c * uc) * v_q
            # the pivot entries are annihilated by construction
            a[ps, qs] = 0.0
            a[qs, ps] = 0.0
        d = np.diagonal(a).real.copy()
        np.fill_diagonal(a, d)
    else:
        residual = _offdiag_norm(a)
        if residual > threshold:
            raise ConvergenceFailure(
                f"Jacobi sweep cap {max_sweeps} reached with off-diagonal "
                f"residual {residual:.3e} (threshold {threshold:.3e})",
                residual=residual,
            )

    values = np.diagonal(a).real.copy()
    order = np.argsort(values, kind="stable")
    return values[order], vectors[:, order]
