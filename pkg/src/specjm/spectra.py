"""Matrix diamond and matrix ball membership, and the compatibility bridge.

The matrix diamond at level n is the set of g-tuples of Hermitian n x n
matrices X with sum_i eps_i X_i <= I for every sign vector eps; its level-1
slice is the l1 ball.  Whether the diamond's matrix range fits inside the
spectrahedron of a shifted effect tuple is exactly joint measurability of
those effects, so the inclusion check here delegates to :mod:`specjm.jm`
rather than to generic completely-positive-map machinery.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from . import jm, sdp
from .errors import LengthMismatch, OutOfRange, TooManyMeasurements
from .linalg import hermitize, is_psd, min_eigenvalue, op_norm, random_hermitian
from .quantum import EffectTuple, Membership, as_scaling_vector
from .serialize import matrix_from_json, matrix_to_json, require_schema, stamp

__all__ = [
    "DEFAULT_SIGN_CAP_G",
    "DiamondSpec",
    "MatrixTuple",
    "diamond_free_inclusion",
    "diamond_level1_inclusion",
    "diamond_membership",
    "matrix_ball_membership",
    "matrix_tuple_from_json",
    "matrix_tuple_to_json",
    "sample_diamond",
    "scale_tuple",
]

DEFAULT_SIGN_CAP_G = 16
MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True)
class MatrixTuple:
    """A g-tuple of Hermitian matrices sharing one dimension (the level)."""

    matrices: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if not self.matrices:
            raise LengthMismatch("a matrix tuple needs at least one matrix")
        mats = tuple(hermitize(m) for m in self.matrices)
        dims = {m.shape[0] for m in mats}
        if len(dims) != 1:
            raise LengthMismatch(f"mixed matrix dimensions {sorted(dims)}")
        object.__setattr__(self, "matrices", mats)

    @classmethod
    def from_matrices(cls, matrices: Iterable[Any]) -> "MatrixTuple":
        return cls(tuple(np.asarray(m, dtype=np.complex128) for m in matrices))

    @property
    def g(self) -> int:
        return len(self.matrices)

    @property
    def level(self) -> int:
        return self.matrices[0].shape[0]


@dataclass(frozen=True)
class DiamondSpec:
    """The matrix diamond on g variables; sign rows are generated on demand."""

    g: int

    def __post_init__(self) -> None:
        if self.g < 1:
            raise OutOfRange(f"the diamond needs g >= 1, got {self.g}")


def _half_sign_vectors(g: int) -> Iterable[tuple[int, ...]]:
    """One sign vector per {eps, -eps} pair (first component fixed to +1)."""
    for rest in itertools.product((1, -1), repeat=g - 1):
        yield (1,) + rest


def _diamond_gauge(matrices: Sequence[np.ndarray], cap_g: int) -> float:
    """max over all sign vectors of the top eigenvalue of sum_i eps_i X_i.

    Negating a sign vector flips the spectrum, so running over half the sign
    vectors with the operator norm covers every top eigenvalue.
    """
    g = len(matrices)
    if g > cap_g:
        raise TooManyMeasurements(
            f"diamond membership enumerates 2^{g} sign vectors; cap is g <= {cap_g}"
        )
    worst = 0.0
    for eps in _half_sign_vectors(g):
        total = sum(e * m for e, m in zip(eps, matrices))
        worst = max(worst, op_norm(total))
    return worst


def diamond_membership(x: MatrixTuple,
                       cap_g: int = DEFAULT_SIGN_CAP_G) -> Membership:
    """Is every signed sum sum_i eps_i X_i below the identity?

    The margin is 1 minus the largest top eigenvalue over all sign vectors;
    membership tolerates boundary overshoot up to 1e-9.  At level 1 this is
    the l1-ball test |x_1| + ... + |x_g| <= 1.
    """
    worst = _diamond_gauge(x.matrices, cap_g)
    return Membership(member=worst <= 1.0 + MEMBERSHIP_TOL, margin=1.0 - worst)


def matrix_ball_membership(x: MatrixTuple) -> Membership:
    """Is sum_i X_i^2 below the identity?  Margin: min-eig(I - sum X_i^2)."""
    total = sum(m @ m for m in x.matrices)
    margin = min_eigenvalue(np.eye(x.level) - total)
    return Membership(member=margin >= -MEMBERSHIP_TOL, margin=margin)


def diamond_level1_inclusion(t: EffectTuple | MatrixTuple | Sequence[Any]) -> bool:
    """Do the scalar diamond vertices map into the shifted-tuple spectrahedron?

    For B_i = 2 E_i - I the vertex checks are B_i <= I and -B_i <= I, which
    hold exactly when each E_i is an effect (0 <= E_i <= I); raw Hermitian
    matrices are accepted so invalid candidates can be tested too.
    """
    if isinstance(t, EffectTuple):
        mats: Sequence[np.ndarray] = t.matrices
    elif isinstance(t, MatrixTuple):
        mats = t.matrices
    else:
        mats = [hermitize(m) for m in t]
    for e in mats:
        eye = np.eye(e.shape[0])
        b = 2.0 * e - eye
        if not (is_psd(eye - b) and is_psd(eye + b)):
            return False
    return True


def diamond_free_inclusion(
    t: EffectTuple,
    tol: float = sdp.DEFAULT_TOL,
    max_iter: int = sdp.DEFAULT_MAX_ITER,
    cap_g: int = jm.DEFAULT_CAP_G,
) -> jm.JmVerdict:
    """Does the whole matrix diamond map into the shifted-tuple spectrahedron?

    At every level at once, this inclusion is equivalent to joint
    measurability of the effects, so the answer is the compatibility verdict
    itself (one parent-POVM SDP, no separate extension machinery).
    """
    return jm.check_compatibility(t, tol=tol, max_iter=max_iter, cap_g=cap_g)


def scale_tuple(x: MatrixTuple, s: Sequence[float]) -> MatrixTuple:
    """Componentwise scaling (s_1 X_1, ..., s_g X_g)."""
    vec = as_scaling_vector(s, length=x.g)
    return MatrixTuple(tuple(float(c) * m for c, m in zip(vec, x.matrices)))


def sample_diamond(g: int, n: int, seed: int, count: int,
                   cap_g: int = DEFAULT_SIGN_CAP_G) -> list[MatrixTuple]:
    """Random members of the level-n diamond, uniform in gauge radius.

    Draws Gaussian Hermitian tuples, rescales each by a uniform radius over
    its diamond gauge, so every output is a member by construction (margin
    1 - radius >= 0) and the samples probe the full body, boundary included.
    """
    if g < 1 or n < 1 or count < 0:
        raise OutOfRange(f"need g, n >= 1 and count >= 0, got {g=} {n=} {count=}")
    rng = np.random.default_rng(seed)
    out: list[MatrixTuple] = []
    while len(out) < count:
        mats = [random_hermitian(n, rng) for _ in range(g)]
        gauge = _diamond_gauge(mats, cap_g)
        if gauge <= 1e-12:
            continue
        radius = rng.uniform(0.0, 1.0)
        scale = radius / gauge
        out.append(MatrixTuple(tuple(scale * m for m in mats)))
    return out


# --- JSON -----------------------------------------------------------------

def matrix_tuple_to_json(x: MatrixTuple) -> dict[str, Any]:
    return stamp({
        "g": x.g,
        "level": x.level,
        "matrices": [matrix_to_json(m) for m in x.matrices],
    })


def matrix_tuple_from_json(doc: dict[str, Any]) -> MatrixTuple:
    require_schema(doc)
    mats = [matrix_from_json(entry) for entry in doc["matrices"]]
    tup = MatrixTuple.from_matrices(mats)
    if "g" in doc and doc["g"] != tup.g:
        raise LengthMismatch(f"document says g={doc['g']} but has {tup.g} matrices")
    if "level" in doc and doc["level"] != tup.level:
        raise LengthMismatch(
            f"document says level={doc['level']} but matrices are {tup.level}-dimensional"
        )
    return tup
