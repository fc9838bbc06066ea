"""Joint measurability of binary measurement tuples.

A tuple (E_1, ..., E_g) is jointly measurable (compatible) when one parent
POVM (G_eta), indexed by sign vectors eta in {-1,+1}^g, satisfies G_eta >= 0,
sum_eta G_eta = I, and sum over {eta : eta_i = +1} G_eta = E_i for every i.
Those conditions are exactly a semidefinite feasibility problem, assembled
here and handed to :mod:`specjm.sdp`; noise robustness is the same program
with the scaling entering the marginal constraints affinely through one extra
scalar variable, maximized in a single solve.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import sdp
from .errors import (
    NumericalBreakdown,
    SpecjmError,
    TooManyMeasurements,
    UnsupportedModel,
    ZeroScaling,
)
from .linalg import max_abs, min_eigenvalue
from .quantum import (
    Balanced,
    EffectTuple,
    General,
    Linear,
    NoiseModel,
    as_scaling_vector,
)

__all__ = [
    "DEFAULT_CAP_G",
    "JmStatus",
    "JmVerdict",
    "JointPovm",
    "RobustnessResult",
    "SweepEntry",
    "assemble_jm_sdp",
    "check_compatibility",
    "region_sweep",
    "robustness",
    "robustness_detail",
    "sign_vectors",
    "witness_margin",
]

DEFAULT_CAP_G = 6
WITNESS_TOL = 1e-8
THREADS_ENV = "SPECJM_THREADS"


def sign_vectors(g: int) -> tuple[tuple[int, ...], ...]:
    """All sign vectors in {+1,-1}^g, in a fixed order ((+1,...,+1) first).

    The order defines the block layout of every program assembled here.
    """
    out: list[tuple[int, ...]] = [()]
    for _ in range(g):
        out = [eta + (sign,) for eta in out for sign in (1, -1)]
    return tuple(out)


@dataclass(frozen=True)
class JointPovm:
    """A parent POVM indexed by sign vectors."""

    g: int
    dim: int
    elements: Mapping[tuple[int, ...], np.ndarray]

    def __post_init__(self) -> None:
        elements = dict(self.elements)
        expected = sign_vectors(self.g)
        if set(elements) != set(expected):
            raise TooManyMeasurements(
                f"parent POVM must have one element per sign vector of length {self.g}"
            )
        for eta, mat in elements.items():
            arr = np.array(mat, dtype=np.complex128, copy=True)
            if arr.shape != (self.dim, self.dim):
                raise TooManyMeasurements(
                    f"element {eta} has shape {arr.shape}, expected ({self.dim}, {self.dim})"
                )
            arr.setflags(write=False)
            elements[eta] = arr
        object.__setattr__(self, "elements", elements)

    def marginal(self, i: int) -> np.ndarray:
        """Sum of elements with eta_i = +1 (the i-th reproduced effect)."""
        total = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for eta, mat in self.elements.items():
            if eta[i] == 1:
                total = total + mat
        return total


def witness_margin(povm: JointPovm, target: EffectTuple,
                   tol: float = WITNESS_TOL) -> float:
    """How comfortably a parent POVM certifies its target tuple.

    The minimum over all element smallest-eigenvalues and, for each equality
    (elements summing to I, marginals hitting the targets), the slack
    ``tol - residual``.  Nonnegative means every invariant holds with room;
    anything above ``-tol`` is accepted as a valid witness.
    """
    margins = [min_eigenvalue(mat) for mat in povm.elements.values()]
    total = sum(povm.elements.values())
    margins.append(tol - max_abs(total - np.eye(povm.dim)))
    for i, effect in enumerate(target.effects):
        margins.append(tol - max_abs(povm.marginal(i) - effect.matrix))
    return float(min(margins))


class JmStatus(str, enum.Enum):
    COMPATIBLE = "Compatible"
    INCOMPATIBLE = "Incompatible"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class JmVerdict:
    """Outcome of a compatibility check.

    ``margin`` semantics by status: Compatible — the witness validity margin
    (see :func:`witness_margin`); Incompatible — minus the strength of the
    dual (Farkas) certificate, in (-1, 0); Indeterminate — minus the best
    residual reached (or -inf when the solver raised).  ``certificate`` echoes
    the dual multipliers when the verdict is Incompatible.
    """

    status: JmStatus
    witness: JointPovm | None
    margin: float
    certificate: np.ndarray | None = None
    solution: sdp.SdpSolution | None = field(default=None, repr=False, compare=False)


# --- SDP assembly ---------------------------------------------------------

def _require_g(g: int, cap_g: int) -> None:
    if g > cap_g:
        raise TooManyMeasurements(
            f"{g} measurements means 2^{g} parent blocks; cap is g <= {cap_g}"
        )


def assemble_jm_sdp(t: EffectTuple, cap_g: int = DEFAULT_CAP_G) -> sdp.SdpProblem:
    """The joint-measurability feasibility program for an effect tuple.

    Blocks are the 2^g parent elements G_eta (order as :func:`sign_vectors`);
    constraints say the elements sum to I and the i-th marginals reproduce
    E_i.  The objective is 0.  The constraint rows are linearly dependent by
    a dimension count only in degenerate cases; either way the solver detects
    and drops dependent rows itself.
    """
    _require_g(t.g, cap_g)
    g, d = t.g, t.dim
    etas = sign_vectors(g)
    nblocks = len(etas)
    constraints: list[sdp.Constraint] = []
    constraints += sdp.expand_matrix_equality(
        np.eye(d), {k: 1.0 for k in range(nblocks)})
    for i in range(g):
        members = {k: 1.0 for k, eta in enumerate(etas) if eta[i] == 1}
        constraints += sdp.expand_matrix_equality(t.effects[i].matrix, members)
    zero = np.zeros((d, d))
    return sdp.SdpProblem(
        blocks=(d,) * nblocks,
        objective=(zero,) * nblocks,
        constraints=tuple(constraints),
        sense="minimize",
    )


def _witness_from_blocks(t: EffectTuple, blocks: Sequence[np.ndarray]) -> JointPovm:
    etas = sign_vectors(t.g)
    return JointPovm(
        g=t.g, dim=t.dim,
        elements={eta: blocks[k] for k, eta in enumerate(etas)},
    )


def check_compatibility(
    t: EffectTuple,
    tol: float = sdp.DEFAULT_TOL,
    max_iter: int = sdp.DEFAULT_MAX_ITER,
    cap_g: int = DEFAULT_CAP_G,
) -> JmVerdict:
    """Decide joint measurability by solving the parent-POVM feasibility SDP.

    Returns Compatible with a validated parent POVM, Incompatible with the
    dual certificate echoed, or Indeterminate when the solver could not reach
    a definite answer (its failure is captured, not raised).
    """
    problem = assemble_jm_sdp(t, cap_g=cap_g)
    try:
        solution = sdp.solve(problem, tol=tol, max_iter=max_iter)
    except SpecjmError:
        return JmVerdict(status=JmStatus.INDETERMINATE, witness=None,
                         margin=-math.inf)
    if solution.status == sdp.SdpStatus.OPTIMAL:
        povm = _witness_from_blocks(t, solution.block_values)
        return JmVerdict(
            status=JmStatus.COMPATIBLE,
            witness=povm,
            margin=witness_margin(povm, t),
            solution=solution,
        )
    if solution.status == sdp.SdpStatus.INFEASIBLE:
        strength = 1.0 / (1.0 + float(np.linalg.norm(solution.duals)))
        return JmVerdict(
            status=JmStatus.INCOMPATIBLE,
            witness=None,
            margin=-strength,
            certificate=solution.duals,
            solution=solution,
        )
    merit = max(solution.residuals["primal_eq"],
                solution.residuals["duality_gap"])
    return JmVerdict(status=JmStatus.INDETERMINATE, witness=None,
                     margin=-abs(merit), solution=solution)


# --- robustness -----------------------------------------------------------

class RobustnessResult(NamedTuple):
    """Full outcome of a robustness maximization."""

    t_star: float
    capped: bool
    t_cap: float
    status: sdp.SdpStatus
    solution: sdp.SdpSolution


def _robustness_problem(
    t: EffectTuple,
    direction: np.ndarray,
    model: NoiseModel,
    t_cap: float,
    cap_g: int,
) -> sdp.SdpProblem:
    g, d = t.g, t.dim
    etas = sign_vectors(g)
    nblocks = len(etas)
    t_block = nblocks          # scalar variable t
    u_block = nblocks + 1      # slack keeping t <= t_cap
    constraints: list[sdp.Constraint] = []
    constraints += sdp.expand_matrix_equality(
        np.eye(d), {k: 1.0 for k in range(nblocks)})
    for i in range(g):
        noise_op = model.operator(t.effects[i].matrix, i)
        members = {k: 1.0 for k, eta in enumerate(etas) if eta[i] == 1}
        # marginal_i - t * dir_i * (E_i - N_i) = N_i  <=>  marginal_i = noisy E_i
        constraints += sdp.expand_matrix_equality(
            noise_op,
            members,
            scalar_blocks={
                t_block: -direction[i] * (t.effects[i].matrix - noise_op)
            },
        )
    one = np.array([[1.0]])
    constraints.append(sdp.Constraint({t_block: one, u_block: one}, t_cap))
    zero = np.zeros((d, d))
    objective = (zero,) * nblocks + (one, np.zeros((1, 1)))
    return sdp.SdpProblem(
        blocks=(d,) * nblocks + (1, 1),
        objective=objective,
        constraints=tuple(constraints),
        sense="maximize",
    )


def robustness_detail(
    t: EffectTuple,
    direction: Sequence[float],
    model: NoiseModel,
    t_cap: float | None = None,
    tol: float = sdp.DEFAULT_TOL,
    max_iter: int = sdp.DEFAULT_MAX_ITER,
    cap_g: int = DEFAULT_CAP_G,
) -> RobustnessResult:
    """Maximize t with add_noise(t * direction) compatible — full detail.

    One SDP with the scalar t entering the marginal constraints affinely.
    ``t_cap`` bounds the search (default: the largest t keeping every
    t * direction_i <= 1); ``capped`` reports that the maximum hit that bound,
    which happens for effect tuples that stay compatible at full strength.
    Supported noise models: Balanced and Linear.
    """
    _require_g(t.g, cap_g)
    if isinstance(model, General):
        raise UnsupportedModel(
            "robustness under the general trivial-effect model is nonconvex; "
            "use Balanced or Linear"
        )
    if not isinstance(model, (Balanced, Linear)):
        raise UnsupportedModel(f"unsupported noise model {model!r}")
    dvec = as_scaling_vector(direction, length=t.g)
    dmax = float(np.max(dvec))
    if dmax == 0.0:
        raise ZeroScaling("direction must have at least one positive entry")
    natural_cap = 1.0 / dmax
    cap = natural_cap if t_cap is None else min(float(t_cap), natural_cap)
    if cap < 0.0:
        raise ZeroScaling(f"t_cap must be nonnegative, got {t_cap}")
    problem = _robustness_problem(t, dvec, model, cap, cap_g)
    solution = sdp.solve(problem, tol=tol, max_iter=max_iter)
    if solution.status not in (sdp.SdpStatus.OPTIMAL, sdp.SdpStatus.MAX_ITER):
        # The program is feasible at t = 0 for every valid effect tuple, so
        # neither certificate status should occur; surface it loudly.
        raise NumericalBreakdown(
            f"robustness solve ended {solution.status.value} on a feasible program"
        )
    t_star = float(solution.objective_value)
    capped = t_star >= cap - 1e-6
    return RobustnessResult(
        t_star=t_star, capped=capped, t_cap=cap,
        status=solution.status, solution=solution,
    )


def robustness(
    t: EffectTuple,
    direction: Sequence[float],
    model: NoiseModel,
    t_cap: float | None = None,
    tol: float = sdp.DEFAULT_TOL,
    max_iter: int = sdp.DEFAULT_MAX_ITER,
    cap_g: int = DEFAULT_CAP_G,
) -> float:
    """Largest t in [0, t_cap] with t * direction a compatible scaling.

    See :func:`robustness_detail` for the capped flag and solver detail.
    """
    return robustness_detail(
        t, direction, model, t_cap=t_cap, tol=tol, max_iter=max_iter,
        cap_g=cap_g,
    ).t_star


# --- sweeps ---------------------------------------------------------------

class SweepEntry(NamedTuple):
    """One direction's robustness, or the error that stopped it."""

    direction: tuple[float, ...]
    t_star: float
    capped: bool
    error: str | None


def _worker_count() -> int | None:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return None
    try:
        count = int(raw)
    except ValueError:
        return None
    return count if count >= 1 else None


def region_sweep(
    t: EffectTuple,
    directions: Iterable[Sequence[float]],
    model: NoiseModel,
    t_cap: float | None = None,
    tol: float = sdp.DEFAULT_TOL,
    max_iter: int = sdp.DEFAULT_MAX_ITER,
    cap_g: int = DEFAULT_CAP_G,
) -> list[SweepEntry]:
    """Robustness over many directions, order-preserving, never aborting.

    Solves fan out over a thread pool (size from the SPECJM_THREADS
    environment variable when set); each entry captures its own failure as a
    string instead of stopping the sweep.
    """
    dirs = [tuple(float(x) for x in d) for d in directions]

    def one(d: tuple[float, ...]) -> SweepEntry:
        try:
            result = robustness_detail(
                t, d, model, t_cap=t_cap, tol=tol, max_iter=max_iter,
                cap_g=cap_g,
            )
        except SpecjmError as exc:
            return SweepEntry(direction=d, t_star=math.nan, capped=False,
                              error=f"{type(exc).__name__}: {exc}")
        return SweepEntry(direction=d, t_star=result.t_star,
                          capped=result.capped, error=None)

    if not dirs:
        return []
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        return list(pool.map(one, dirs))


# --- JSON -----------------------------------------------------------------

def verdict_to_json(verdict: JmVerdict) -> dict[str, Any]:
    """CLI-facing verdict document: {status, margin, witness?}."""
    from .serialize import matrix_to_json, stamp

    doc: dict[str, Any] = {
        "status": verdict.status.value,
        "margin": verdict.margin,
    }
    if verdict.witness is not None:
        doc["witness"] = {
            "g": verdict.witness.g,
            "dim": verdict.witness.dim,
            "elements": [
                {"eta": list(eta), "matrix": matrix_to_json(mat)}
                for eta, mat in sorted(verdict.witness.elements.items(),
                                       reverse=True)
            ],
        }
    if verdict.certificate is not None:
        doc["certificate_duals"] = [float(x) for x in verdict.certificate]
    return stamp(doc)
