"""Witness families: spin systems, mutually unbiased bases, and a trace
criterion for incompatibility.

Spin systems (tuples of pairwise anti-commuting, self-adjoint, unitary
matrices) generate the most incompatible effect tuples in their dimension;
mutually unbiased bases give projection tuples whose centered Gram matrices
have orthogonal supports; and the trace criterion turns those Gram matrices
into an SDP whose value above the dimension certifies incompatibility.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from . import sdp
from .errors import (
    DegenerateOutcome,
    DimensionOverflow,
    LengthMismatch,
    NotPrime,
    OutOfRange,
    SkippedOutcomeWarning,
    TrivialSubset,
)
from .linalg import (
    DEFAULT_DIM_CAP,
    conj_entrywise,
    hermitize,
    is_psd,
    kron,
    max_abs,
    op_norm,
)
from .quantum import EffectTuple, as_scaling_vector
from .serialize import matrix_from_json, matrix_to_json, require_schema, stamp

__all__ = [
    "MubFamily",
    "SpinSystem",
    "ZhuGram",
    "conjugate_norm_identity_check",
    "extremal_effect_tuple",
    "mub_effect_tuple",
    "mub_family",
    "mub_family_from_json",
    "mub_family_to_json",
    "spin_system",
    "spin_system_from_json",
    "spin_system_to_json",
    "zhu_bound",
    "zhu_gram",
]

_SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)

SPIN_INVARIANT_TOL = 1e-12
MUB_TOL = 1e-10
ZERO_TRACE_TOL = 1e-10


# --- spin systems ---------------------------------------------------------

@dataclass(frozen=True)
class SpinSystem:
    """Pairwise anti-commuting, self-adjoint, unitary matrices in dim 2^k.

    Entries are 0, +-1, +-i, so the defining relations F_i F_j + F_j F_i = 0
    (i != j) and F_i^2 = I hold exactly; construction re-checks them to
    1e-12, along with tracelessness for k >= 1.
    """

    k: int
    dim: int
    matrices: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if self.dim != 2 ** self.k:
            raise OutOfRange(f"dim {self.dim} is not 2^{self.k}")
        mats = tuple(hermitize(m) for m in self.matrices)
        eye = np.eye(self.dim)
        for i, f in enumerate(mats):
            if f.shape != (self.dim, self.dim):
                raise LengthMismatch(
                    f"matrix {i} has shape {f.shape}, expected ({self.dim}, {self.dim})"
                )
            if max_abs(f @ f - eye) > SPIN_INVARIANT_TOL:
                raise OutOfRange(f"matrix {i} is not unitary-involutive")
            if self.k >= 1 and abs(np.trace(f)) > SPIN_INVARIANT_TOL:
                raise OutOfRange(f"matrix {i} is not traceless")
            for j in range(i):
                if max_abs(f @ mats[j] + mats[j] @ f) > SPIN_INVARIANT_TOL:
                    raise OutOfRange(f"matrices {j} and {i} do not anti-commute")
        object.__setattr__(self, "matrices", mats)

    @property
    def g(self) -> int:
        return len(self.matrices)


def _spin_level(k: int) -> list[np.ndarray]:
    """The full 2k+1 anti-commuting family in dimension 2^k, recursively."""
    mats = [np.ones((1, 1), dtype=np.complex128)]
    for level in range(k):
        eye = np.eye(2 ** level)
        mats = [np.kron(_SX, f) for f in mats] + [np.kron(_SY, eye),
                                                  np.kron(_SZ, eye)]
    return mats


def spin_system(g: int, dim_cap: int = DEFAULT_DIM_CAP) -> SpinSystem:
    """The first g matrices of the minimal-dimension anti-commuting family.

    g matrices need dimension 2^ceil((g-1)/2); the recursion prepends a
    Pauli factor to each previous-level matrix and appends two fresh ones.
    """
    if g < 1:
        raise OutOfRange(f"need g >= 1, got {g}")
    k = g // 2  # equals ceil((g - 1) / 2)
    dim = 2 ** k
    if dim > dim_cap:
        raise DimensionOverflow(f"spin system for g={g} needs dim {dim} > cap {dim_cap}")
    return SpinSystem(k=k, dim=dim, matrices=tuple(_spin_level(k)[:g]))


def extremal_effect_tuple(g: int, dim_cap: int = DEFAULT_DIM_CAP) -> EffectTuple:
    """The sharpest g-tuple its dimension allows: effects (F_i + I)/2.

    Spectra are {0, 1}; in dimension 2^ceil((g-1)/2) the symmetric
    compatibility threshold of this tuple is exactly 1/sqrt(g).
    """
    if g < 2:
        raise OutOfRange(f"need g >= 2, got {g}")
    sys = spin_system(g, dim_cap=dim_cap)
    eye = np.eye(sys.dim)
    return EffectTuple.from_matrices([(f + eye) / 2.0 for f in sys.matrices])


def conjugate_norm_identity_check(
    a: Sequence[float], sys: SpinSystem,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> tuple[float, float]:
    """Evaluate ||sum_i a_i conj(F_i) (x) F_i|| against its closed form sum_i a_i.

    For nonnegative weights on a spin system the two agree exactly; the
    return is (computed norm, weight sum) so callers can assert the gap.
    """
    vec = as_scaling_vector(a)
    if len(vec) > sys.g:
        raise LengthMismatch(
            f"{len(vec)} weights for a {sys.g}-matrix spin system"
        )
    total = np.zeros((sys.dim ** 2, sys.dim ** 2), dtype=np.complex128)
    for w, f in zip(vec, sys.matrices):
        total = total + w * kron(conj_entrywise(f), f, dim_cap=dim_cap)
    return op_norm(total), float(sum(vec))


# --- mutually unbiased bases ---------------------------------------------

@dataclass(frozen=True)
class MubFamily:
    """d+1 orthonormal bases of C^d with all cross overlaps |<x,y>|^2 = 1/d.

    Each basis is a d x d matrix whose columns are the basis vectors.
    """

    d: int
    bases: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        bases = tuple(np.array(b, dtype=np.complex128, copy=True) for b in self.bases)
        eye = np.eye(self.d)
        for idx, b in enumerate(bases):
            if b.shape != (self.d, self.d):
                raise LengthMismatch(
                    f"basis {idx} has shape {b.shape}, expected ({self.d}, {self.d})"
                )
            if max_abs(b.conj().T @ b - eye) > MUB_TOL:
                raise OutOfRange(f"basis {idx} is not orthonormal")
            b.setflags(write=False)
        for i, bi in enumerate(bases):
            for j in range(i):
                overlaps = np.abs(bi.conj().T @ bases[j]) ** 2
                if max_abs(overlaps - 1.0 / self.d) > MUB_TOL:
                    raise OutOfRange(f"bases {j} and {i} are not mutually unbiased")
        object.__setattr__(self, "bases", bases)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def mub_family(d: int, dim_cap: int = DEFAULT_DIM_CAP) -> MubFamily:
    """The complete family of d+1 mutually unbiased bases, prime d only.

    d = 2 uses the computational, Hadamard, and circular bases; odd primes
    use the quadratic-phase construction psi^(a)_j[k] = w^(a k^2 + j k)/sqrt(d)
    alongside the computational basis.  Composite d raises NotPrime (the
    prime-power constructions need finite-field arithmetic, not provided).
    """
    if d > dim_cap:
        raise DimensionOverflow(f"dimension {d} exceeds cap {dim_cap}")
    if not _is_prime(d):
        raise NotPrime(f"complete unbiased-bases family requires prime d, got {d}")
    eye = np.eye(d, dtype=np.complex128)
    if d == 2:
        s = 1.0 / math.sqrt(2.0)
        hadamard = np.array([[s, s], [s, -s]], dtype=np.complex128)
        circular = np.array([[s, s], [1.0j * s, -1.0j * s]], dtype=np.complex128)
        return MubFamily(d=2, bases=(eye, hadamard, circular))
    omega = np.exp(2.0j * np.pi / d)
    ks = np.arange(d)
    bases: list[np.ndarray] = [eye]
    for a in range(d):
        cols = np.empty((d, d), dtype=np.complex128)
        for j in range(d):
            cols[:, j] = omega ** ((a * ks * ks + j * ks) % d) / math.sqrt(d)
        bases.append(cols)
    return MubFamily(d=d, bases=tuple(bases))


def mub_effect_tuple(fam: MubFamily,
                     subsets: Sequence[Iterable[int]]) -> EffectTuple:
    """Projections E_i = sum_{j in J_i} |x_j><x_j| from distinct bases.

    Subset i selects columns (0-based) of basis i; each must be neither
    empty nor the full basis, so every projection is nontrivial.  Distinct
    unbiased bases make the centered projections pairwise orthogonal in the
    trace inner product: d tr[E_i E_j] = tr[E_i] tr[E_j].
    """
    if len(subsets) > len(fam.bases):
        raise LengthMismatch(
            f"{len(subsets)} subsets for {len(fam.bases)} bases"
        )
    effects = []
    for i, raw in enumerate(subsets):
        idx = sorted(set(int(j) for j in raw))
        if any(j < 0 or j >= fam.d for j in idx):
            raise OutOfRange(f"subset {i} has indices outside 0..{fam.d - 1}")
        if len(idx) == 0 or len(idx) == fam.d:
            raise TrivialSubset(
                f"subset {i} must be neither empty nor all {fam.d} columns"
            )
        cols = fam.bases[i][:, idx]
        effects.append(cols @ cols.conj().T)
    return EffectTuple.from_matrices(effects)


# --- trace criterion for incompatibility ----------------------------------

@dataclass(frozen=True)
class ZhuGram:
    """A PSD d^2 x d^2 Gram matrix of vectorized POVM outcomes."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = hermitize(self.matrix)
        if not is_psd(m, tol=1e-8):
            raise DegenerateOutcome("Gram matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))


def _vec(m: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization (fixed convention; traces independent)."""
    return np.asarray(m).reshape(-1, order="F")


def zhu_gram(outcomes: Sequence[Any]) -> tuple[ZhuGram, ZhuGram]:
    """Gram matrices of a POVM's outcomes, plain and trace-centered.

    Each outcome A contributes |vec A><vec A| / tr[A]; the centered variant
    uses A° = A - (tr[A]/d) I instead.  Outcomes with negative trace are
    rejected; zero-trace outcomes carry no weight and are skipped with a
    warning.  For a binary POVM (P, I - P) with P a nontrivial projection,
    the centered Gram has trace exactly 1.
    """
    mats = [hermitize(m) for m in outcomes]
    if not mats:
        raise LengthMismatch("need at least one POVM outcome")
    d = mats[0].shape[0]
    plain = np.zeros((d * d, d * d), dtype=np.complex128)
    centered = np.zeros((d * d, d * d), dtype=np.complex128)
    eye = np.eye(d)
    for i, m in enumerate(mats):
        if m.shape[0] != d:
            raise LengthMismatch(f"outcome {i} has dimension {m.shape[0]}, expected {d}")
        tr = float(np.real(np.trace(m)))
        if tr < -ZERO_TRACE_TOL:
            raise DegenerateOutcome(f"outcome {i} has negative trace {tr}")
        if tr <= ZERO_TRACE_TOL:
            warnings.warn(
                f"outcome {i} has (near-)zero trace and was skipped",
                SkippedOutcomeWarning, stacklevel=2,
            )
            continue
        v = _vec(m)
        plain += np.outer(v, v.conj()) / tr
        vc = _vec(m - (tr / d) * eye)
        centered += np.outer(vc, vc.conj()) / tr
    return ZhuGram(plain), ZhuGram(centered)


def zhu_bound(
    povms: Sequence[Sequence[Any]],
    tol: float = sdp.DEFAULT_TOL,
    max_iter: int = sdp.DEFAULT_MAX_ITER,
) -> float:
    """1 + min tr[H] over H dominating every centered Gram matrix.

    A value exceeding the Hilbert-space dimension certifies that no parent
    POVM exists (incompatibility); values up to the dimension are
    inconclusive.  With a single POVM the optimum is its centered Gram trace.
    """
    if not povms:
        raise LengthMismatch("need at least one POVM")
    grams = [zhu_gram(p)[1] for p in povms]
    n = grams[0].dim
    if any(g.dim != n for g in grams):
        raise LengthMismatch("POVMs live in different dimensions")
    nblocks = 1 + len(grams)
    constraints: list[sdp.Constraint] = []
    for i, gram in enumerate(grams):
        constraints += sdp.expand_matrix_equality(
            gram.matrix, {0: 1.0, 1 + i: -1.0})
    objective = (np.eye(n),) + (np.zeros((n, n)),) * len(grams)
    problem = sdp.SdpProblem(
        blocks=(n,) * nblocks,
        objective=objective,
        constraints=tuple(constraints),
        sense="minimize",
    )
    solution = sdp.solve(problem, tol=tol, max_iter=max_iter)
    return 1.0 + float(solution.objective_value)


# --- JSON -----------------------------------------------------------------

def spin_system_to_json(sys: SpinSystem) -> dict[str, Any]:
    return stamp({
        "g": sys.g,
        "k": sys.k,
        "dim": sys.dim,
        "matrices": [matrix_to_json(m) for m in sys.matrices],
    })


def spin_system_from_json(doc: dict[str, Any]) -> SpinSystem:
    require_schema(doc)
    mats = tuple(matrix_from_json(m) for m in doc["matrices"])
    return SpinSystem(k=int(doc["k"]), dim=int(doc["dim"]), matrices=mats)


def mub_family_to_json(fam: MubFamily) -> dict[str, Any]:
    return stamp({
        "d": fam.d,
        "bases": [matrix_to_json(b) for b in fam.bases],
    })


def mub_family_from_json(doc: dict[str, Any]) -> MubFamily:
    require_schema(doc)
    bases = tuple(matrix_from_json(b) for b in doc["bases"])
    return MubFamily(d=int(doc["d"]), bases=bases)
