"""Block-diagonal Hermitian SDP solver: examples, invariants, oracle checks."""
from __future__ import annotations

import numpy as np
import pytest

from specjm import jm, sdp
from specjm.errors import DependentConstraintWarning, DimensionOverflow, TooAsymmetric
from specjm.linalg import frobenius_inner, random_hermitian
from specjm.quantum import EffectTuple

from conftest import I2, SX, SY, SZ, make_feasible_problem


# --- building blocks ------------------------------------------------------
@pytest.mark.parametrize("dim", [1, 2, 3])
def test_hermitian_basis_spans_hermitian_space(dim):
    basis = sdp.hermitian_basis(dim)
    assert len(basis) == dim * dim
    for f in basis:
        assert np.allclose(f, f.conj().T)
    gram = np.array([[frobenius_inner(a, b) for b in basis] for a in basis])
    assert np.linalg.matrix_rank(gram) == dim * dim


def test_expand_matrix_equality_rows_evaluate_correctly():
    rng = np.random.default_rng(2)
    rhs = random_hermitian(2, rng)
    x = random_hermitian(2, rng)
    d_scalar = random_hermitian(2, rng)
    u = 0.37
    rows = sdp.expand_matrix_equality(
        rhs, matrix_blocks={0: 2.0}, scalar_blocks={1: d_scalar})
    assert len(rows) == 4
    basis = sdp.hermitian_basis(2)
    for row, f in zip(rows, basis):
        lhs = sum(
            frobenius_inner(coeff, x if k == 0 else np.array([[u]]))
            for k, coeff in row.coeffs.items()
        )
        want = frobenius_inner(f, 2.0 * x + u * d_scalar)
        assert lhs == pytest.approx(want, abs=1e-12)
        assert row.rhs == pytest.approx(frobenius_inner(f, rhs), abs=1e-12)


# --- worked examples ------------------------------------------------------
def test_scalar_minimization_example():
    prob = sdp.SdpProblem(
        blocks=(1,),
        objective=(np.array([[1.0]]),),
        constraints=(sdp.Constraint({0: np.array([[1.0]])}, 1.0),),
    )
    sol = sdp.solve(prob)
    assert sol.status is sdp.SdpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(1.0, abs=1e-8)
    assert sol.block_values[0][0, 0].real == pytest.approx(1.0, abs=1e-8)
    assert sol.duals.shape == (1,)


def test_maximize_scalar_against_psd_block():
    # maximize t subject to X = I - t*diag(1,-1) entrywise, X >= 0:
    # X = diag(1-t, 1+t) is PSD exactly when t <= 1.
    rows = sdp.expand_matrix_equality(
        np.eye(2), matrix_blocks={0: 1.0}, scalar_blocks={1: np.diag([1.0, -1.0])})
    prob = sdp.SdpProblem(
        blocks=(2, 1),
        objective=(np.zeros((2, 2)), np.array([[1.0]])),
        constraints=tuple(rows),
        sense="maximize",
    )
    sol = sdp.solve(prob)
    assert sol.status is sdp.SdpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(1.0, abs=1e-7)
    assert sol.block_values[1][0, 0].real == pytest.approx(1.0, abs=1e-7)


def test_maximize_top_eigenvalue():
    # max <diag(2,1), X> s.t. tr X = 1, X >= 0  ->  top eigenvalue 2.
    prob = sdp.SdpProblem(
        blocks=(2,),
        objective=(np.diag([2.0, 1.0]),),
        constraints=(sdp.Constraint({0: np.eye(2)}, 1.0),),
        sense="maximize",
    )
    sol = sdp.solve(prob)
    assert sol.status is sdp.SdpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(2.0, abs=1e-7)


def test_sharp_pauli_pair_sdp_infeasible_with_certificate():
    t = EffectTuple.from_matrices([(I2 + SX) / 2, (I2 + SZ) / 2])
    prob = jm.assemble_jm_sdp(t)
    sol = sdp.solve(prob)
    assert sol.status is sdp.SdpStatus.INFEASIBLE
    rhs = np.array([c.rhs for c in prob.constraints])
    assert float(rhs @ sol.duals) == pytest.approx(1.0, abs=1e-7)
    # Farkas dual feasibility: sum_j y_j A_jk = -S_k with S_k PSD.
    for k, dim in enumerate(prob.blocks):
        acc = np.zeros((dim, dim), dtype=np.complex128)
        for j, con in enumerate(prob.constraints):
            if k in con.coeffs:
                acc += sol.duals[j] * con.coeffs[k]
        assert np.max(np.abs(acc + sol.block_values[k])) < 1e-6
        assert np.min(np.linalg.eigvalsh(sol.block_values[k])) > -1e-7
    assert sol.residuals["certificate_objective"] == pytest.approx(1.0)
    assert sol.residuals["certificate_residual"] < 1e-8


# --- real embedding -------------------------------------------------------
def test_realify_matrix_pauli_y_literal():
    want = np.array([
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ])
    assert np.array_equal(sdp.realify_matrix(SY), want)


def test_realify_matrix_real_input_block_diagonal():
    m = np.array([[1.0, 2.0], [2.0, -3.0]])
    out = sdp.realify_matrix(m)
    assert np.array_equal(out[:2, :2], m)
    assert np.array_equal(out[2:, 2:], m)
    assert np.array_equal(out[:2, 2:], np.zeros((2, 2)))
    assert np.array_equal(out[2:, :2], np.zeros((2, 2)))


def test_realify_matrix_doubles_eigenvalues():
    rng = np.random.default_rng(17)
    h = random_hermitian(3, rng)
    doubled = np.sort(np.repeat(np.linalg.eigvalsh(h), 2))
    got = np.sort(np.linalg.eigvalsh(sdp.realify_matrix(h)))
    assert np.max(np.abs(got - doubled)) < 1e-10


# --- solution invariants on a random corpus -------------------------------
def _corpus(seed=7, size=40):
    rng = np.random.default_rng(seed)
    for _ in range(size):
        nb = int(rng.integers(1, 4))
        dims = [int(rng.integers(1, 5)) for _ in range(nb)]
        m = int(rng.integers(1, sum(d * d for d in dims) + 1))
        yield make_feasible_problem(rng, dims, m)


def test_optimal_residual_invariants_on_corpus():
    for prob in _corpus(size=15):
        sol = sdp.solve(prob)
        assert sol.status is sdp.SdpStatus.OPTIMAL
        assert sol.residuals["primal_eq"] <= 1e-8
        assert sol.residuals["min_block_eig"] >= -1e-8
        assert sol.residuals["duality_gap"] <= 1e-7
        for x in sol.block_values:
            assert np.min(np.linalg.eigvalsh(x)) >= -1e-8


def test_per_iterate_duality_accounting_and_gap_decrease():
    """Primal >= dual at every iterate, up to the tracked residual terms.

    The recorded gap residual and the homogenizing complementarity kappa
    account exactly for any dual excess: pobj - dobj + (rg + kappa)/tau = 0.
    The complementarity measure mu must decrease in >= 90% of iterations.
    """
    checked = 0
    for prob in _corpus():
        sol = sdp.solve(prob)
        h = sol.history
        assert len(h) >= 2
        scale = 1.0 + max(abs(r.primal_obj) for r in h)
        for r in h:
            assert r.tau > 0.0 and r.kappa > 0.0 and r.mu > 0.0
            identity = r.primal_obj - r.dual_obj + (r.gap_residual + r.kappa) / r.tau
            assert abs(identity) <= 1e-9 * scale
            # residual-aware weak duality implied by kappa > 0
            slack = (abs(r.gap_residual) + r.kappa) / r.tau
            assert r.primal_obj - r.dual_obj >= -slack - 1e-12 * scale
        decreases = sum(h[i + 1].mu < h[i].mu for i in range(len(h) - 1))
        assert decreases / (len(h) - 1) >= 0.9
        # at convergence the reported pair obeys plain weak duality to tolerance
        assert h[-1].primal_obj - h[-1].dual_obj >= -1e-6 * scale
        checked += 1
    assert checked == 40


def test_objective_scaling_invariance():
    rng = np.random.default_rng(12)
    prob = make_feasible_problem(rng, [2, 3], 5)
    base = sdp.solve(prob)
    assert base.status is sdp.SdpStatus.OPTIMAL
    for c in (2.5, 17.0):
        scaled = sdp.SdpProblem(
            prob.blocks,
            tuple(c * obj for obj in prob.objective),
            prob.constraints,
            prob.sense,
        )
        sol = sdp.solve(scaled)
        assert sol.status is sdp.SdpStatus.OPTIMAL
        assert sol.objective_value == pytest.approx(
            c * base.objective_value, rel=1e-6, abs=1e-6)
        for got, want in zip(sol.block_values, base.block_values):
            assert np.max(np.abs(got - want)) < 1e-7


# --- degenerate shapes ----------------------------------------------------
def test_no_constraints_positive_cost_reaches_zero():
    prob = sdp.SdpProblem(
        blocks=(2,),
        objective=(np.diag([1.0, 2.0]),),
        constraints=(),
    )
    sol = sdp.solve(prob)
    assert sol.status is sdp.SdpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(0.0, abs=1e-6)


def test_no_constraints_indefinite_cost_unbounded():
    prob = sdp.SdpProblem(
        blocks=(2,),
        objective=(np.diag([1.0, -1.0]),),
        constraints=(),
    )
    sol = sdp.solve(prob)
    assert sol.status is sdp.SdpStatus.UNBOUNDED
    ray_cost = sum(
        frobenius_inner(c, x) for c, x in zip(prob.objective, sol.block_values))
    assert ray_cost == pytest.approx(-1.0, abs=1e-6)
    for x in sol.block_values:
        assert np.min(np.linalg.eigvalsh(x)) >= -1e-8


def test_dependent_rows_dropped_with_warning_and_zero_multiplier():
    con = sdp.Constraint({0: np.eye(2)}, 1.0)
    prob = sdp.SdpProblem(
        blocks=(2,),
        objective=(np.diag([1.0, 2.0]),),
        constraints=(con, con),
    )
    with pytest.warns(DependentConstraintWarning):
        sol = sdp.solve(prob)
    assert sol.status is sdp.SdpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(1.0, abs=1e-7)
    assert sol.duals.shape == (2,)
    assert sol.duals[1] == 0.0


def test_max_iter_returns_best_iterate():
    rng = np.random.default_rng(4)
    prob = make_feasible_problem(rng, [3, 3], 8)
    sol = sdp.solve(prob, max_iter=2)
    assert sol.status is sdp.SdpStatus.MAX_ITER
    assert {"primal_eq", "min_block_eig", "duality_gap"} <= set(sol.residuals)


def test_size_cap_enforced():
    prob = sdp.SdpProblem(
        blocks=(2,), objective=(np.zeros((2, 2)),), constraints=())
    with pytest.raises(DimensionOverflow):
        sdp.solve(prob, size_cap=1)


# --- construction validation ----------------------------------------------
def test_problem_validation_errors():
    with pytest.raises(TooAsymmetric):
        sdp.SdpProblem((2,), (np.array([[0.0, 1.0], [0.0, 0.0]]),), ())
    with pytest.raises(DimensionOverflow):
        sdp.SdpProblem((2,), (np.eye(3),), ())
    with pytest.raises(DimensionOverflow):
        sdp.SdpProblem((), (), ())
    with pytest.raises(ValueError):
        sdp.SdpProblem((1,), (np.eye(1),), (), sense="solve")
    with pytest.raises(DimensionOverflow):
        sdp.SdpProblem(
            (1,), (np.eye(1),),
            (sdp.Constraint({3: np.eye(1)}, 0.0),))


def test_problem_json_round_trip():
    rng = np.random.default_rng(8)
    prob = make_feasible_problem(rng, [2, 1], 3)
    doc = sdp.problem_to_json(prob)
    back = sdp.problem_from_json(doc)
    assert back.blocks == prob.blocks
    assert back.sense == prob.sense
    assert len(back.constraints) == len(prob.constraints)
    for a, b in zip(back.constraints, prob.constraints):
        assert a.rhs == pytest.approx(b.rhs, abs=1e-15)
        assert set(a.coeffs) == set(b.coeffs)
        for k in a.coeffs:
            assert np.array_equal(a.coeffs[k], b.coeffs[k])
    assert sdp.solve(back).objective_value == pytest.approx(
        sdp.solve(prob).objective_value, abs=1e-8)


# --- independent oracle ---------------------------------------------------
def test_objective_matches_cvxpy_oracle():
    cp = pytest.importorskip("cvxpy")
    rng = np.random.default_rng(23)
    for _ in range(5):
        dims = [int(rng.integers(1, 4)) for _ in range(int(rng.integers(1, 3)))]
        m = int(rng.integers(1, 5))
        prob = make_feasible_problem(rng, dims, m)
        sol = sdp.solve(prob)
        assert sol.status is sdp.SdpStatus.OPTIMAL

        xs = [cp.Variable((d, d), hermitian=True) for d in dims]
        cons = [x >> 0 for x in xs]
        for con in prob.constraints:
            cons.append(
                cp.sum([cp.real(cp.trace(con.coeffs[k] @ xs[k]))
                        for k in con.coeffs]) == con.rhs)
        objective = cp.Minimize(
            cp.sum([cp.real(cp.trace(c @ x))
                    for c, x in zip(prob.objective, xs)]))
        ref = cp.Problem(objective, cons)
        ref.solve(solver=cp.SCS, eps=1e-8)
        assert sol.objective_value == pytest.approx(
            float(ref.value), rel=1e-5, abs=1e-5)
