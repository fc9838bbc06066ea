"""Dense complex Hermitian linear algebra.

Hermitian matrices are plain ``numpy.ndarray`` values of dtype complex128,
validated and symmetrized on construction by :func:`hermitize`.  All
operations are pure functions; eigendecompositions go through the
deterministic Jacobi backend selected in :mod:`specjm._backend`, so results
are reproducible for a fixed input on a fixed backend.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from ._backend import BACKEND, jacobi_eigh
from .errors import DimensionOverflow, NonFinite, NonSquare

__all__ = [
    "BACKEND",
    "DEFAULT_DIM_CAP",
    "DEFAULT_PSD_TOL",
    "EigenDecomposition",
    "conj_entrywise",
    "eig",
    "frobenius_inner",
    "hermitize",
    "is_hermitian",
    "is_psd",
    "kron",
    "max_abs",
    "max_asymmetry",
    "min_eigenvalue",
    "op_norm",
    "random_hermitian",
]

DEFAULT_PSD_TOL = 1e-9
DEFAULT_ASYMMETRY_TOL = 1e-8
DEFAULT_DIM_CAP = 4096
_PSD_ABS_FLOOR = 1e-12

HermitianArray = npt.NDArray[np.complex128]


class EigenDecomposition(NamedTuple):
    """Ascending eigenvalues and the matching unitary of column eigenvectors."""

    eigenvalues: npt.NDArray[np.float64]
    eigenvectors: npt.NDArray[np.complex128]


def _as_square_complex(raw: npt.ArrayLike, what: str = "matrix") -> np.ndarray:
    m = np.asarray(raw, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonSquare(f"{what} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(np.float64))):
        raise NonFinite(f"{what} contains NaN or Inf entries")
    return m


def max_abs(m: npt.ArrayLike) -> float:
    """Largest entry magnitude (the entrywise max norm)."""
    arr = np.asarray(m)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def max_asymmetry(raw: npt.ArrayLike) -> float:
    """Largest entry magnitude of M − M*."""
    m = np.asarray(raw, dtype=np.complex128)
    return max_abs(m - m.conj().T)


def hermitize(raw: npt.ArrayLike, asym_tol: float = DEFAULT_ASYMMETRY_TOL) -> HermitianArray:
    """Return the Hermitian part (M + M*)/2 of a square matrix.

    Rejects matrices whose measured asymmetry exceeds ``asym_tol`` times the
    largest entry magnitude — such inputs are data errors, not roundoff.
    """
    from .errors import TooAsymmetric

    m = _as_square_complex(raw)
    asym = max_asymmetry(m)
    scale = max_abs(m)
    if asym > asym_tol * scale:
        raise TooAsymmetric(
            f"matrix asymmetry {asym:.3e} exceeds {asym_tol:.1e} x scale {scale:.3e}"
        )
    return (m + m.conj().T) / 2.0


def is_hermitian(m: npt.ArrayLike, tol: float = 1e-12) -> bool:
    """Check M = M* within an entrywise tolerance relative to the scale."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        return False
    return max_asymmetry(arr) <= tol * max(1.0, max_abs(arr))


def kron(a: npt.ArrayLike, b: npt.ArrayLike, dim_cap: int = DEFAULT_DIM_CAP) -> HermitianArray:
    """Kronecker product; the result dimension must stay within ``dim_cap``."""
    ma = _as_square_complex(a, "left factor")
    mb = _as_square_complex(b, "right factor")
    out_dim = ma.shape[0] * mb.shape[0]
    if out_dim > dim_cap:
        raise DimensionOverflow(
            f"Kronecker product dimension {out_dim} exceeds cap {dim_cap}"
        )
    return np.kron(ma, mb)


def eig(m: npt.ArrayLike, dim_cap: int = DEFAULT_DIM_CAP) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix via deterministic Jacobi sweeps.

    The input is symmetrized first, so tiny non-Hermitian roundoff from
    upstream arithmetic cannot change the result.  Eigenvalues are ascending;
    ``vectors[:, k]`` is the unit eigenvector for ``values[k]``.
    """
    arr = _as_square_complex(m)
    if arr.shape[0] > dim_cap:
        raise DimensionOverflow(f"dimension {arr.shape[0]} exceeds cap {dim_cap}")
    herm = (arr + arr.conj().T) / 2.0
    values, vectors = jacobi_eigh(herm)
    return EigenDecomposition(values, vectors)


def min_eigenvalue(m: npt.ArrayLike) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    return float(eig(m).eigenvalues[0])


def is_psd(m: npt.ArrayLike, tol: float = DEFAULT_PSD_TOL) -> bool:
    """Positive semidefiniteness up to a scale-relative tolerance.

    True iff the smallest eigenvalue is ≥ −max(tol·max(1, ‖m‖_max), 1e−12);
    the relative form absorbs solver-level noise on the inputs this package
    produces, the absolute floor keeps the test meaningful for tiny matrices.
    """
    threshold = max(tol * max(1.0, max_abs(m)), _PSD_ABS_FLOOR)
    return min_eigenvalue(m) >= -threshold


def op_norm(m: npt.ArrayLike) -> float:
    """Operator norm of a Hermitian matrix (largest absolute eigenvalue)."""
    values = eig(m).eigenvalues
    return float(max(abs(values[0]), abs(values[-1])))


def conj_entrywise(m: npt.ArrayLike) -> HermitianArray:
    """Entrywise complex conjugate; Hermitian in, Hermitian out."""
    return np.conj(_as_square_complex(m))


def frobenius_inner(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    """Real Frobenius inner product Re tr[A* B] (= tr[AB] for Hermitian A, B)."""
    ma = np.asarray(a, dtype=np.complex128)
    mb = np.asarray(b, dtype=np.complex128)
    return float(np.real(np.sum(np.conj(ma) * mb)))


def random_hermitian(dim: int, rng: np.random.Generator) -> HermitianArray:
    """A random Hermitian matrix with independent Gaussian entries (GUE-style)."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2.0
