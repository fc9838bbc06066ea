# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled core of the deterministic Jacobi eigensolver.

Same algorithm and sweep schedule as the NumPy fallback in
``specjm._jacobi_py`` (cyclic round-robin Hermitian Jacobi); the rotations are
applied with scalar loops instead of batched array operations.  Compiled with
floating-point contraction off, so the two backends agree to roundoff.
"""

import numpy as np

from libc.math cimport copysign, fabs, hypot, sqrt

from ._schedule import round_robin_rounds
from .errors import ConvergenceFailure

BACKEND_NAME = "compiled"


cdef double _offdiag_norm(double complex[:, ::1] a, Py_ssize_t n) noexcept:
    cdef Py_ssize_t i, j
    cdef double acc = 0.0, re, im
    for i in range(n):
        for j in range(n):
            if i != j:
                re = a[i, j].real
                im = a[i, j].imag
                acc += re * re + im * im
    return sqrt(acc)


cdef void _rotate(
    double complex[:, ::1] a,
    double complex[:, ::1] v,
    Py_ssize_t n,
    Py_ssize_t p,
    Py_ssize_t q,
) noexcept:
    cdef double complex apq = a[p, q]
    cdef double r = hypot(apq.real, apq.imag)
    if r == 0.0:
        return
    cdef double complex u = apq / r
    cdef double complex uc = u.conjugate()
    cdef double app = a[p, p].real
    cdef double aqq = a[q, q].real
    cdef double tau = (aqq - app) / (2.0 * r)
    cdef double t = copysign(1.0, tau) / (fabs(tau) + sqrt(1.0 + tau * tau))
    cdef double c = 1.0 / sqrt(1.0 + t * t)
    cdef double s = t * c
    cdef Py_ssize_t k
    cdef double complex xp, xq
    # columns:  A <- A.Q
    for k in range(n):
        xp = a[k, p]
        xq = a[k, q]
        a[k, p] = c * xp - (s * uc) * xq
        a[k, q] = s * xp + (c * uc) * xq
    # rows:  A <- Q*.A
    for k in range(n):
        xp = a[p, k]
        xq = a[q, k]
        a[p, k] = c * xp - (s * u) * xq
        a[q, k] = s * xp + (c * u) * xq
    # accumulate eigenvectors:  V <- V.Q
    for k in range(n):
        xp = v[k, p]
        xq = v[k, q]
        v[k, p] = c * xp - (s * uc) * xq
        v[k, q] = s * xp + (c * uc) * xq
    a[p, q] = 0.0
    a[q, p] = 0.0


def jacobi_eigh(matrix, double tol=1e-14, int max_sweeps=60):
    """Diagonalize a Hermitian matrix; return (eigenvalues, eigenvectors).

    Mirrors ``specjm._jacobi_py.jacobi_eigh`` exactly (same schedule, same
    rotation formulas, same convergence rule).
    """
    a_arr = np.array(matrix, dtype=np.complex128, order="C")
    cdef Py_ssize_t n = a_arr.shape[0]
    if n == 1:
        return a_arr.real.reshape(1).copy(), np.ones((1, 1), dtype=np.complex128)

    v_arr = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] a = a_arr
    cdef double complex[:, ::1] v = v_arr
    cdef double scale = float(np.linalg.norm(a_arr))
    cdef double tiny = float(np.finfo(float).tiny)
    cdef double threshold = tol * (scale if scale > tiny else tiny)

    cdef Py_ssize_t p, q, i
    cdef int sweep
    cdef bint converged = False
    rounds = round_robin_rounds(n)
    for sweep in range(max_sweeps):
        if _offdiag_norm(a, n) <= threshold:
            converged = True
            break
        for rnd in rounds:
            for p, q in rnd:
                _rotate(a, v, n, p, q)
        for i in range(n):
            a[i, i] = a[i, i].real
    if not converged:
        residual = _offdiag_norm(a, n)
        if residual > threshold:
            raise ConvergenceFailure(
                f"Jacobi sweep cap {max_sweeps} reached with off-diagonal "
                f"residual {residual:.3e} (threshold {threshold:.3e})",
                residual=residual,
            )

    values = np.diagonal(a_arr).real.copy()
    order = np.argsort(values, kind="stable")
    return values[order], v_arr[:, order]
