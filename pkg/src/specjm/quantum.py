"""Quantum-measurement domain layer.

Binary measurements are represented by their effects: Hermitian operators E
with 0 <= E <= I, each standing for the outcome pair {E, I - E}.  This module
provides validated effect tuples, the three noise models used for
compatibility regions, dimension embeddings, compressions, a reproducible
random-tuple sampler, and a spectral sufficient criterion for compatibility.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from typing import Any, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    LengthMismatch,
    NegativeComponent,
    NotAnEffect,
    NotIsometry,
    OutOfRange,
    ZeroScaling,
)
from .linalg import (
    DEFAULT_PSD_TOL,
    eig,
    hermitize,
    is_psd,
    max_abs,
)
from .serialize import matrix_from_json, matrix_to_json, require_schema, stamp

__all__ = [
    "Balanced",
    "Effect",
    "EffectTuple",
    "General",
    "Linear",
    "Membership",
    "NoiseModel",
    "add_noise",
    "as_scaling_vector",
    "compress",
    "effect_tuple_from_json",
    "effect_tuple_to_json",
    "embed_unbias",
    "embed_zero_pad",
    "parse_noise_model",
    "random_effect_tuple",
    "sufficient_compatibility_criterion",
]


class Membership(NamedTuple):
    """A yes/no answer together with how far inside (or outside) the point is.

    Truth-tests as the boolean answer; ``margin`` is positive strictly inside,
    about zero on the boundary, negative outside.
    """

    member: bool
    margin: float

    def __bool__(self) -> bool:  # pragma: no cover - trivial
        return self.member


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Effect:
    """A validated effect: Hermitian with spectrum in [0, 1] (within tolerance).

    ``clamp=True`` projects the spectrum onto [0, 1] before validating, for
    operators coming back from solver round-trips with tiny violations.
    """

    matrix: np.ndarray
    clamp: InitVar[bool] = False

    def __post_init__(self, clamp: bool) -> None:
        m = hermitize(self.matrix)
        if clamp:
            values, vectors = eig(m)
            clipped = np.clip(values, 0.0, 1.0)
            m = (vectors * clipped) @ vectors.conj().T
            m = (m + m.conj().T) / 2.0
        d = m.shape[0]
        if not is_psd(m):
            raise NotAnEffect("operator has an eigenvalue below 0")
        if not is_psd(np.eye(d) - m):
            raise NotAnEffect("operator has an eigenvalue above 1")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class EffectTuple:
    """A tuple of g >= 1 effects sharing one dimension."""

    effects: tuple[Effect, ...]

    def __post_init__(self) -> None:
        effects = tuple(self.effects)
        if not effects:
            raise LengthMismatch("an effect tuple needs at least one effect")
        dims = {e.dim for e in effects}
        if len(dims) != 1:
            raise LengthMismatch(f"effects have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "effects", effects)

    @classmethod
    def from_matrices(cls, matrices: Sequence[np.ndarray], clamp: bool = False
                      ) -> "EffectTuple":
        return cls(tuple(Effect(m, clamp=clamp) for m in matrices))

    @property
    def g(self) -> int:
        return len(self.effects)

    @property
    def dim(self) -> int:
        return self.effects[0].dim

    @property
    def matrices(self) -> tuple[np.ndarray, ...]:
        return tuple(e.matrix for e in self.effects)


def as_scaling_vector(
    s: Sequence[float] | np.ndarray,
    length: int | None = None,
    unit_interval: bool = False,
) -> np.ndarray:
    """Validate a per-measurement scaling vector.

    Always requires finite nonnegative entries; ``unit_interval=True`` also
    requires entries <= 1.  ``length`` pins the expected number of entries.
    """
    arr = np.asarray(s, dtype=np.float64).reshape(-1)
    if length is not None and arr.size != length:
        raise LengthMismatch(f"scaling vector has {arr.size} entries, expected {length}")
    if not np.all(np.isfinite(arr)):
        raise OutOfRange("scaling vector has non-finite entries")
    if np.any(arr < 0.0):
        raise NegativeComponent(f"scaling vector has negative entries: {arr}")
    if unit_interval and np.any(arr > 1.0):
        raise OutOfRange(f"scaling vector exceeds 1: {arr}")
    return arr


# --- noise models ---------------------------------------------------------

class NoiseModel:
    """How an effect is mixed toward triviality when scaled by s < 1."""

    def operator(self, effect: np.ndarray, index: int) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Balanced(NoiseModel):
    """Mix with the unbiased coin I/2."""

    def operator(self, effect: np.ndarray, index: int) -> np.ndarray:
        return np.eye(effect.shape[0], dtype=np.complex128) / 2.0


@dataclass(frozen=True)
class Linear(NoiseModel):
    """Mix with the trace-matched trivial effect tr[E]/d * I."""

    def operator(self, effect: np.ndarray, index: int) -> np.ndarray:
        d = effect.shape[0]
        return np.eye(d, dtype=np.complex128) * (np.real(np.trace(effect)) / d)


@dataclass(frozen=True)
class General(NoiseModel):
    """Mix with arbitrary trivial effects a_i * I, a_i in [0, 1]."""

    a: tuple[float, ...]

    def __post_init__(self) -> None:
        a = tuple(float(x) for x in self.a)
        if any(not 0.0 <= x <= 1.0 for x in a):
            raise OutOfRange(f"trivial-effect levels must lie in [0,1]: {a}")
        object.__setattr__(self, "a", a)

    def operator(self, effect: np.ndarray, index: int) -> np.ndarray:
        if index >= len(self.a):
            raise LengthMismatch(
                f"noise level index {index} out of range for {len(self.a)} levels"
            )
        return np.eye(effect.shape[0], dtype=np.complex128) * self.a[index]


def parse_noise_model(text: str) -> NoiseModel:
    """Parse ``balanced``, ``linear``, or ``general:a1,a2,...``."""
    lowered = text.strip().lower()
    if lowered == "balanced":
        return Balanced()
    if lowered == "linear":
        return Linear()
    if lowered.startswith("general:"):
        levels = tuple(float(x) for x in lowered.split(":", 1)[1].split(","))
        return General(levels)
    raise OutOfRange(f"unknown noise model {text!r}")


def add_noise(t: EffectTuple, s: Sequence[float], model: NoiseModel) -> EffectTuple:
    """Scale each effect toward its noise operator: E_i -> s_i E_i + (1-s_i) N_i.

    For all three models the output stays a valid effect tuple for s in [0,1]^g.
    """
    svec = as_scaling_vector(s, length=t.g, unit_interval=True)
    out = []
    for i, e in enumerate(t.effects):
        noise_op = model.operator(e.matrix, i)
        out.append(svec[i] * e.matrix + (1.0 - svec[i]) * noise_op)
    return EffectTuple.from_matrices(out)


# --- embeddings and compressions ------------------------------------------

def embed_zero_pad(t: EffectTuple) -> EffectTuple:
    """Append one dimension on which every effect acts as 0."""
    d = t.dim
    out = []
    for e in t.effects:
        m = np.zeros((d + 1, d + 1), dtype=np.complex128)
        m[:d, :d] = e.matrix
        out.append(m)
    return EffectTuple.from_matrices(out)


def embed_unbias(t: EffectTuple) -> EffectTuple:
    """Map each effect E to E ⊕ (I - E) on a doubled space; traces become d.

    The trace of every output effect equals the input dimension exactly: the
    rounding left over from the complementary diagonal pairs is absorbed into
    the last diagonal entry.
    """
    d = t.dim
    out = []
    for e in t.effects:
        m = np.zeros((2 * d, 2 * d), dtype=np.complex128)
        m[:d, :d] = e.matrix
        m[d:, d:] = np.eye(d) - e.matrix
        for _ in range(5):
            defect = float(np.real(np.trace(m))) - d
            if defect == 0.0:
                break
            m[-1, -1] -= defect
        out.append(m)
    return EffectTuple.from_matrices(out)


def compress(t: EffectTuple, v: np.ndarray, isometry_tol: float = 1e-10
             ) -> EffectTuple:
    """Conjugate every effect by an isometry: E -> V* E V.

    ``v`` has shape (d, k) with orthonormal columns; the output lives in
    dimension k.  Compressions of compatible tuples stay compatible.
    """
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < arr.shape[1]:
        raise NotIsometry(f"isometry must be d x k with k <= d, got {arr.shape}")
    k = arr.shape[1]
    gram = arr.conj().T @ arr
    if max_abs(gram - np.eye(k)) > isometry_tol:
        raise NotIsometry(
            f"columns are not orthonormal: ||V*V - I|| = {max_abs(gram - np.eye(k)):.3e}"
        )
    return EffectTuple.from_matrices(
        [arr.conj().T @ e.matrix @ arr for e in t.effects], clamp=False
    )


# --- sampling -------------------------------------------------------------

def random_effect_tuple(g: int, d: int, seed: int) -> EffectTuple:
    """Deterministic random tuple: eigenbasis from QR of a seeded complex
    Gaussian matrix, spectrum uniform on [0, 1]^d, per effect."""
    if g < 1 or d < 1:
        raise OutOfRange(f"need g >= 1 and d >= 1, got g={g}, d={d}")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(g):
        ginibre = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        q, _ = np.linalg.qr(ginibre)
        spectrum = rng.uniform(0.0, 1.0, size=d)
        out.append((q * spectrum) @ q.conj().T)
    return EffectTuple.from_matrices(out)


# --- sufficient compatibility criterion -----------------------------------

def sufficient_compatibility_criterion(
    t: EffectTuple, s: Sequence[float], tol: float = DEFAULT_PSD_TOL
) -> bool:
    """Spectral test: is each (1/s_i) E_i - ((1-s_i)/(2s_i)) I an effect?

    True means every E_i can be written as s_i F_i + (1-s_i) I/2 for some
    effect F_i, i.e. the tuple is an s-scaled noisy version of some tuple.
    That certifies compatibility whenever s itself is a compatible scaling
    vector — in particular whenever sum(s_i^2) <= 1, which works in every
    dimension.  The check itself is purely spectral and makes no claim for
    s outside such a region.
    """
    svec = as_scaling_vector(s, length=t.g, unit_interval=True)
    if np.any(svec == 0.0):
        raise ZeroScaling("criterion requires every s_i > 0")
    d = t.dim
    eye = np.eye(d)
    for si, e in zip(svec, t.effects):
        shifted = e.matrix / si - ((1.0 - si) / (2.0 * si)) * eye
        if not (is_psd(shifted, tol) and is_psd(eye - shifted, tol)):
            return False
    return True


# --- JSON -----------------------------------------------------------------

def effect_tuple_to_json(t: EffectTuple) -> dict[str, Any]:
    """Encode as {"schema", "g", "dim", "effects": [matrix, ...]}."""
    return stamp({
        "g": t.g,
        "dim": t.dim,
        "effects": [matrix_to_json(e.matrix) for e in t.effects],
    })


def effect_tuple_from_json(document: Mapping[str, Any], clamp: bool = False
                           ) -> EffectTuple:
    """Decode a document written by :func:`effect_tuple_to_json`."""
    require_schema(document)
    matrices = [matrix_from_json(m) for m in document["effects"]]
    t = EffectTuple.from_matrices(matrices, clamp=clamp)
    declared_g = document.get("g")
    declared_dim = document.get("dim")
    if declared_g is not None and int(declared_g) != t.g:
        raise LengthMismatch(f"document says g={declared_g}, found {t.g} effects")
    if declared_dim is not None and int(declared_dim) != t.dim:
        raise LengthMismatch(
            f"document says dim={declared_dim}, matrices have dim {t.dim}"
        )
    return t
