"""End-to-end verification suite: solver results against closed forms.

Each check pits an SDP-computed quantity against an independently known
value - compatibility thresholds of maximally incompatible families, trace
identities of the incompatibility criterion, cloning-region algebra, spin
relations, and set inclusions - with explicit tolerances and, where results
must arrive interactively, wall-clock limits.  The CLI selftest and the
test suite both run exactly this list.
"""

from __future__ import annotations

import math
import time
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import constructions, jm, regions, sdp, spectra
from .quantum import Balanced, EffectTuple, Linear, add_noise, compress, random_effect_tuple

__all__ = ["ALL_CHECK_NAMES", "CheckResult", "run_check", "run_checks"]


class CheckResult(NamedTuple):
    name: str
    passed: bool
    expected: str
    measured: str
    elapsed: float
    detail: str = ""


def _tol(tol: float | None) -> float:
    return sdp.DEFAULT_TOL if tol is None else float(tol)


def _iters(max_iter: int | None) -> int:
    return sdp.DEFAULT_MAX_ITER if max_iter is None else int(max_iter)


def _sharp_tuple(g: int) -> EffectTuple:
    return constructions.extremal_effect_tuple(g)


# --- individual checks ----------------------------------------------------

def check_pauli_pair_threshold(tol=None, max_iter=None) -> CheckResult:
    """Sharp qubit X/Z pair: symmetric threshold 1/sqrt(2), within 1e-5, < 1 s."""
    start = time.perf_counter()
    t_star = jm.robustness(_sharp_tuple(2), (1.0, 1.0), Balanced(),
                           tol=_tol(tol), max_iter=_iters(max_iter))
    elapsed = time.perf_counter() - start
    err = abs(t_star - 1.0 / math.sqrt(2.0))
    return CheckResult(
        name="pauli-pair-threshold",
        passed=err <= 1e-5 and elapsed < 1.0,
        expected=f"t* = {1.0 / math.sqrt(2.0):.10f} +- 1e-5 in < 1 s",
        measured=f"t* = {t_star:.10f} (err {err:.2e}) in {elapsed:.3f} s",
        elapsed=elapsed,
    )


def check_pauli_triple_threshold(tol=None, max_iter=None) -> CheckResult:
    """Sharp qubit X/Y/Z triple: symmetric threshold 1/sqrt(3), within 1e-5, < 2 s."""
    start = time.perf_counter()
    t_star = jm.robustness(_sharp_tuple(3), (1.0, 1.0, 1.0), Balanced(),
                           tol=_tol(tol), max_iter=_iters(max_iter))
    elapsed = time.perf_counter() - start
    err = abs(t_star - 1.0 / math.sqrt(3.0))
    return CheckResult(
        name="pauli-triple-threshold",
        passed=err <= 1e-5 and elapsed < 2.0,
        expected=f"t* = {1.0 / math.sqrt(3.0):.10f} +- 1e-5 in < 2 s",
        measured=f"t* = {t_star:.10f} (err {err:.2e}) in {elapsed:.3f} s",
        elapsed=elapsed,
    )


def check_spin_extremal_thresholds(tol=None, max_iter=None) -> CheckResult:
    """Anti-commuting 4- and 5-tuples in dim 4: thresholds 1/sqrt(g) within 1e-4, < 30 s each."""
    start = time.perf_counter()
    errs = []
    times = []
    for g in (4, 5):
        t0 = time.perf_counter()
        t_star = jm.robustness(_sharp_tuple(g), (1.0,) * g, Balanced(),
                               tol=_tol(tol), max_iter=_iters(max_iter))
        times.append(time.perf_counter() - t0)
        errs.append(abs(t_star - 1.0 / math.sqrt(g)))
    elapsed = time.perf_counter() - start
    return CheckResult(
        name="spin-extremal-thresholds",
        passed=max(errs) <= 1e-4 and max(times) < 30.0,
        expected="t* = 1/sqrt(g) +- 1e-4 for g = 4, 5 in < 30 s each",
        measured=(f"errs g=4: {errs[0]:.2e}, g=5: {errs[1]:.2e}; "
                  f"times {times[0]:.2f} s, {times[1]:.2f} s"),
        elapsed=elapsed,
    )


def check_unit_direction_lower_bound(tol=None, max_iter=None) -> CheckResult:
    """50 random (g=3, d=3) tuples x 20 unit directions: t* >= 1 - 1e-4, < 5 min."""
    start = time.perf_counter()
    worst = math.inf
    for trial in range(50):
        t = random_effect_tuple(3, 3, seed=1000 + trial)
        rng = np.random.default_rng(5000 + trial)
        for _ in range(20):
            u = np.abs(rng.normal(size=3)) + 1e-3
            u /= float(np.linalg.norm(u))
            t_star = jm.robustness(t, tuple(u), Balanced(),
                                   tol=_tol(tol), max_iter=_iters(max_iter))
            worst = min(worst, t_star)
    elapsed = time.perf_counter() - start
    return CheckResult(
        name="unit-direction-lower-bound",
        passed=worst >= 1.0 - 1e-4 and elapsed < 300.0,
        expected="min t* over 1000 unit directions >= 1 - 1e-4 in < 5 min",
        measured=f"min t* = {worst:.8f} in {elapsed:.1f} s",
        elapsed=elapsed,
    )


def check_half_dim_symmetric_bound(tol=None, max_iter=None) -> CheckResult:
    """100 random (g=4, d=2) tuples: symmetric t* >= 1/(2d) = 0.25, < 5 min."""
    start = time.perf_counter()
    worst = math.inf
    for trial in range(100):
        t = random_effect_tuple(4, 2, seed=2000 + trial)
        t_star = jm.robustness(t, (1.0,) * 4, Balanced(),
                               tol=_tol(tol), max_iter=_iters(max_iter))
        worst = min(worst, t_star)
    elapsed = time.perf_counter() - start
    return CheckResult(
        name="half-dim-symmetric-bound",
        passed=worst >= 0.25 and elapsed < 300.0,
        expected="min symmetric t* over 100 random tuples >= 0.25 in < 5 min",
        measured=f"min t* = {worst:.8f} in {elapsed:.1f} s",
        elapsed=elapsed,
    )


def check_trace_criterion_tightness(tol=None, max_iter=None) -> CheckResult:
    """Scaled sharp qubit MUB pair: criterion value 1 + 2t^2 crosses 2 at
    t = 1/sqrt(2) +- 1e-6, and the compatibility threshold matches to 1e-5."""
    start = time.perf_counter()
    fam = constructions.mub_family(2)
    pair = constructions.mub_effect_tuple(fam, [{0}, {0}])
    solver_tol = _tol(tol)
    iters = _iters(max_iter)

    def bound_at(t: float) -> float:
        noisy = add_noise(pair, (t, t), Linear())
        povms = [[e.matrix, np.eye(2) - e.matrix] for e in noisy.effects]
        return constructions.zhu_bound(povms, tol=solver_tol, max_iter=iters)

    lo, hi = 0.5, 0.9
    for _ in range(24):
        mid = (lo + hi) / 2.0
        if bound_at(mid) < 2.0:
            lo = mid
        else:
            hi = mid
    crossing = (lo + hi) / 2.0
    cross_err = abs(crossing - 1.0 / math.sqrt(2.0))
    t_star = jm.robustness(pair, (1.0, 1.0), Linear(),
                           tol=solver_tol, max_iter=iters)
    jm_err = abs(t_star - 1.0 / math.sqrt(2.0))
    elapsed = time.perf_counter() - start
    return CheckResult(
        name="trace-criterion-tightness",
        passed=cross_err <= 1e-6 and jm_err <= 1e-5,
        expected="criterion crossing and threshold both at 0.7071068 (1e-6 / 1e-5)",
        measured=f"crossing err {cross_err:.2e}, threshold err {jm_err:.2e}",
        elapsed=elapsed,
    )


def check_gram_trace_scaling(tol=None, max_iter=None) -> CheckResult:
    """Centered Gram trace is 1 for nontrivial projection pairs (1e-10) and
    scales by s^2 under tracial mixing."""
    start = time.perf_counter()
    worst = 0.0
    rng = np.random.default_rng(42)
    cases = []
    for d in (2, 3):
        for rank in range(1, d):
            for _ in range(10):
                m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
                q, _ = np.linalg.qr(m)
                p = q[:, :rank] @ q[:, :rank].conj().T
                cases.append((d, p))
    for d, p in cases:
        eye = np.eye(d)
        _, cent = constructions.zhu_gram([p, eye - p])
        worst = max(worst, abs(cent.trace - 1.0))
        for s in (0.3, 0.8):
            ps = s * p + (1.0 - s) * (np.trace(p).real / d) * eye
            _, cs = constructions.zhu_gram([ps, eye - ps])
            worst = max(worst, abs(cs.trace - s * s))
    elapsed = time.perf_counter() - start
    return CheckResult(
        name="gram-trace-scaling",
        passed=worst <= 1e-10,
        expected="|trace - 1| and |trace - s^2| <= 1e-10 over 40 projections",
        measured=f"worst deviation {worst:.2e}",
        elapsed=elapsed,
    )


def check_cloning_formula_identities(tol=None, max_iter=None) -> CheckResult:
    """Symmetric boundary matches (g+d)/(g(1+d)) to 1e-12; unit vectors are
    exactly on the boundary; the pair closed form agrees with the general one."""
    start = time.perf_counter()
    worst_sym = 0.0
    for g in range(2, 21):
        for d in range(2, 21):
            lo, hi = 0.0, 1.0
            for _ in range(60):
                mid = (lo + hi) / 2.0
                if regions.clone_membership(g, d, (mid,) * g).slack <= 0.0:
                    lo = mid
                else:
                    hi = mid
            worst_sym = max(worst_sym, abs((lo + hi) / 2.0
                                           - regions.symmetric_clone_value(g, d)))
    exact_vertex = True
    for g in (2, 3, 4, 7):
        for d in (2, 3, 5, 20):
            for i in range(g):
                e_i = tuple(1.0 if j == i else 0.0 for j in range(g))
                if regions.clone_membership(g, d, e_i).slack != 0.0:
                    exact_vertex = False
    mismatches = 0
    grid = np.linspace(0.0, 1.0, 100)
    for d in (2, 3):
        for s in grid:
            for t in grid:
                a = regions.clone_pair_membership(d, float(s), float(t))
                b = regions.clone_membership(2, d, (float(s), float(t)))
                if a.member != b.member and not (abs(a.slack) <= 1e-6
                                                 and abs(b.slack) <= 1e-6):
                    mismatches += 1
    elapsed = time.perf_counter() - start
    passed = worst_sym <= 1e-12 and exact_vertex and mismatches == 0
    return CheckResult(
        name="cloning-formula-identities",
        passed=passed,
        expected="symmetric boundary err <= 1e-12; exact unit vertices; 0 grid mismatches",
        measured=(f"symmetric err {worst_sym:.2e}; exact vertices {exact_vertex}; "
                  f"{mismatches} mismatches on 2x100x100 grid"),
        elapsed=elapsed,
        detail="both algebraic forms are re-asserted inside every evaluation",
    )


def check_spin_invariants(tol=None, max_iter=None) -> CheckResult:
    """Anti-commutation/unitarity/tracelessness <= 1e-12 for g <= 9 and the
    conjugate-product norm identity within 1e-8 over 100 weight draws."""
    start = time.perf_counter()
    worst_alg = 0.0
    for g in range(1, 10):
        sys = constructions.spin_system(g)
        eye = np.eye(sys.dim)
        for i, f in enumerate(sys.matrices):
            worst_alg = max(worst_alg, float(np.max(np.abs(f - f.conj().T))))
            worst_alg = max(worst_alg, float(np.max(np.abs(f @ f - eye))))
            if g >= 2:
                worst_alg = max(worst_alg, abs(complex(np.trace(f))))
            for j in range(i):
                anti = f @ sys.matrices[j] + sys.matrices[j] @ f
                worst_alg = max(worst_alg, float(np.max(np.abs(anti))))
    draws = {2: 20, 3: 20, 4: 15, 5: 15, 6: 10, 7: 10, 8: 5, 9: 5}
    worst_norm = 0.0
    rng = np.random.default_rng(9)
    for g, count in draws.items():
        sys = constructions.spin_system(g)
        for _ in range(count):
            a = rng.uniform(0.0, 2.0, size=g)
            lhs, rhs = constructions.conjugate_norm_identity_check(tuple(a), sys)
            worst_norm = max(worst_norm, abs(lhs - rhs))
    elapsed = time.perf_counter() - start
    return CheckResult(
        name="spin-invariants-norm-identity",
        passed=worst_alg <= 1e-12 and worst_norm <= 1e-8,
        expected="algebra <= 1e-12 (g <= 9); norm identity <= 1e-8 (100 draws)",
        measured=f"algebra {worst_alg:.2e}; norm identity {worst_norm:.2e}",
        elapsed=elapsed,
    )


def check_diamond_inside_ball(tol=None, max_iter=None) -> CheckResult:
    """10^4 sampled diamond members (g, level <= 4) all inside the matrix ball."""
    start = time.perf_counter()
    worst = math.inf
    total = 0
    for g in range(1, 5):
        for n in range(1, 5):
            for sample in spectra.sample_diamond(g, n, seed=100 * g + n, count=625):
                margin = spectra.matrix_ball_membership(sample).margin
                worst = min(worst, margin)
                total += 1
    elapsed = time.perf_counter() - start
    return CheckResult(
        name="diamond-inside-ball",
        passed=worst >= -1e-9 and total == 10000,
        expected="ball margin >= -1e-9 on 10000 samples",
        measured=f"min margin {worst:.2e} on {total} samples",
        elapsed=elapsed,
    )


def check_inclusion_bridge_consistency(tol=None, max_iter=None) -> CheckResult:
    """Free-inclusion and compatibility verdicts agree on 500 tuples,
    compatible and incompatible alike."""
    start = time.perf_counter()
    solver_tol = _tol(tol)
    iters = _iters(max_iter)
    tuples: list[EffectTuple] = []
    for trial in range(150):
        tuples.append(random_effect_tuple(2, 2, seed=3000 + trial))
    for trial in range(100):
        tuples.append(random_effect_tuple(3, 2, seed=4000 + trial))
    pair = _sharp_tuple(2)
    for s in np.linspace(0.5, 0.95, 125):
        tuples.append(add_noise(pair, (float(s),) * 2, Balanced()))
    triple = _sharp_tuple(3)
    for s in np.linspace(0.45, 0.85, 125):
        tuples.append(add_noise(triple, (float(s),) * 3, Balanced()))
    mismatches = 0
    n_incompatible = 0
    for t in tuples:
        a = spectra.diamond_free_inclusion(t, tol=solver_tol, max_iter=iters)
        b = jm.check_compatibility(t, tol=solver_tol, max_iter=iters)
        if a.status != b.status:
            mismatches += 1
        if b.status == jm.JmStatus.INCOMPATIBLE:
            n_incompatible += 1
    elapsed = time.perf_counter() - start
    return CheckResult(
        name="inclusion-bridge-consistency",
        passed=mismatches == 0 and len(tuples) == 500 and n_incompatible > 0,
        expected="identical verdicts on 500 tuples, some incompatible",
        measured=(f"{mismatches} mismatches; {n_incompatible} incompatible "
                  f"among {len(tuples)}"),
        elapsed=elapsed,
    )


def check_compression_preserves_compatibility(tol=None, max_iter=None) -> CheckResult:
    """100 compatible 4-dim tuples compressed by random isometries to dim 2
    stay verified compatible."""
    start = time.perf_counter()
    solver_tol = _tol(tol)
    iters = _iters(max_iter)
    failures = 0
    for trial in range(100):
        base = random_effect_tuple(2, 4, seed=6000 + trial)
        compat = add_noise(base, (0.6, 0.6), Balanced())
        rng = np.random.default_rng(7000 + trial)
        m = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
        v, _ = np.linalg.qr(m)
        small = compress(compat, v)
        verdict = jm.check_compatibility(small, tol=solver_tol, max_iter=iters)
        if verdict.status != jm.JmStatus.COMPATIBLE:
            failures += 1
    elapsed = time.perf_counter() - start
    return CheckResult(
        name="compression-preserves-compatibility",
        passed=failures == 0,
        expected="100 of 100 compressed tuples verified compatible",
        measured=f"{100 - failures} of 100 compatible",
        elapsed=elapsed,
    )


_CHECKS: dict[str, Callable[..., CheckResult]] = {
    "pauli-pair-threshold": check_pauli_pair_threshold,
    "pauli-triple-threshold": check_pauli_triple_threshold,
    "spin-extremal-thresholds": check_spin_extremal_thresholds,
    "unit-direction-lower-bound": check_unit_direction_lower_bound,
    "half-dim-symmetric-bound": check_half_dim_symmetric_bound,
    "trace-criterion-tightness": check_trace_criterion_tightness,
    "gram-trace-scaling": check_gram_trace_scaling,
    "cloning-formula-identities": check_cloning_formula_identities,
    "spin-invariants-norm-identity": check_spin_invariants,
    "diamond-inside-ball": check_diamond_inside_ball,
    "inclusion-bridge-consistency": check_inclusion_bridge_consistency,
    "compression-preserves-compatibility": check_compression_preserves_compatibility,
}

ALL_CHECK_NAMES: tuple[str, ...] = tuple(_CHECKS)


def run_check(name: str, tol: float | None = None,
              max_iter: int | None = None) -> CheckResult:
    """Run one named check; unknown names raise KeyError."""
    return _CHECKS[name](tol=tol, max_iter=max_iter)


def run_checks(names: Sequence[str] | None = None, tol: float | None = None,
               max_iter: int | None = None) -> list[CheckResult]:
    """Run the named checks (default: all, in order) and return their results."""
    selected = ALL_CHECK_NAMES if names is None else tuple(names)
    unknown = [n for n in selected if n not in _CHECKS]
    if unknown:
        raise KeyError(f"unknown checks: {', '.join(unknown)}")
    return [run_check(n, tol=tol, max_iter=max_iter) for n in selected]
