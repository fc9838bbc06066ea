"""Joint-measurability SDP assembly, verdicts, robustness, and sweeps."""
from __future__ import annotations

import json
import math

import numpy as np
import pytest

from specjm import jm, sdp
from specjm.errors import TooManyMeasurements, UnsupportedModel, ZeroScaling
from specjm.quantum import (
    Balanced,
    EffectTuple,
    General,
    Linear,
    add_noise,
    random_effect_tuple,
)

from conftest import I2, SX, SZ


# --- sign vectors and parent POVMs ----------------------------------------
def test_sign_vectors_enumeration():
    vecs = jm.sign_vectors(3)
    assert len(vecs) == 8
    assert vecs[0] == (1, 1, 1)
    assert len(set(vecs)) == 8
    assert all(all(e in (-1, 1) for e in v) for v in vecs)
    assert vecs == jm.sign_vectors(3)


def test_joint_povm_marginals_and_validation():
    elements = {eta: np.eye(2) / 4 for eta in jm.sign_vectors(2)}
    povm = jm.JointPovm(g=2, dim=2, elements=elements)
    assert np.allclose(povm.marginal(0), I2 / 2)
    assert np.allclose(povm.marginal(1), I2 / 2)
    short = dict(list(elements.items())[:3])
    with pytest.raises(TooManyMeasurements):
        jm.JointPovm(g=2, dim=2, elements=short)


def test_witness_margin_of_exact_product_povm(half_identity_pair):
    povm = jm.JointPovm(
        g=2, dim=2,
        elements={eta: np.eye(2) / 4 for eta in jm.sign_vectors(2)})
    margin = jm.witness_margin(povm, half_identity_pair)
    # The margin is the min over block eigenvalues (1/4 here) and the equality
    # slacks tol - residual; with zero residuals the slacks win at exactly tol.
    assert margin == pytest.approx(jm.WITNESS_TOL, rel=1e-9)
    assert margin > 0.0


# --- SDP assembly ---------------------------------------------------------
def test_assembly_shape_single_measurement():
    t = EffectTuple.from_matrices([np.diag([0.3, 0.7])])
    prob = jm.assemble_jm_sdp(t)
    assert prob.blocks == (2, 2)
    assert len(prob.constraints) == 2 * 4
    assert prob.sense == "minimize"
    assert all(np.count_nonzero(c) == 0 for c in prob.objective)


def test_assembly_shape_pair_of_qubits(pauli_xz_tuple):
    prob = jm.assemble_jm_sdp(pauli_xz_tuple)
    assert prob.blocks == (2, 2, 2, 2)
    assert len(prob.constraints) == 3 * 4


def test_assembly_rejects_too_many_measurements():
    t = EffectTuple.from_matrices([I2 / 2] * 7)
    with pytest.raises(TooManyMeasurements):
        jm.assemble_jm_sdp(t)
    with pytest.raises(TooManyMeasurements):
        jm.check_compatibility(
            EffectTuple.from_matrices([I2 / 2] * 3), cap_g=2)


def test_commuting_diagonal_effects_feasible():
    t = EffectTuple.from_matrices([np.diag([1.0, 0.0]), np.diag([0.5, 0.5])])
    verdict = jm.check_compatibility(t)
    assert verdict.status is jm.JmStatus.COMPATIBLE


# --- compatibility verdicts -----------------------------------------------
def test_sharp_pauli_pair_incompatible(pauli_xz_tuple):
    verdict = jm.check_compatibility(pauli_xz_tuple)
    assert verdict.status is jm.JmStatus.INCOMPATIBLE
    assert verdict.witness is None
    assert verdict.margin < 0.0
    assert verdict.certificate is not None


def test_half_identity_pair_compatible(half_identity_pair):
    verdict = jm.check_compatibility(half_identity_pair)
    assert verdict.status is jm.JmStatus.COMPATIBLE
    assert verdict.witness is not None
    for element in verdict.witness.elements.values():
        assert np.max(np.abs(element - I2 / 4)) < 1e-6


def test_scaled_pauli_pair_compatible(pauli_xz_tuple):
    noisy = add_noise(pauli_xz_tuple, (0.7, 0.7), Balanced())
    verdict = jm.check_compatibility(noisy)
    assert verdict.status is jm.JmStatus.COMPATIBLE


def test_compatible_witness_revalidates_independently():
    for seed in (11, 12):
        t = add_noise(random_effect_tuple(2, 3, seed=seed),
                      (0.5, 0.5), Balanced())
        verdict = jm.check_compatibility(t)
        assert verdict.status is jm.JmStatus.COMPATIBLE
        povm = verdict.witness
        total = sum(povm.elements.values())
        assert np.max(np.abs(total - np.eye(3))) < 1e-8
        for i in range(2):
            assert np.max(np.abs(povm.marginal(i) - t.matrices[i])) < 1e-8
        for element in povm.elements.values():
            assert np.min(np.linalg.eigvalsh(element)) > -1e-8
        assert verdict.margin >= -1e-8


# --- robustness -----------------------------------------------------------
def test_pauli_pair_robustness_value(pauli_xz_tuple):
    t_star = jm.robustness(pauli_xz_tuple, (1.0, 1.0), Balanced())
    assert t_star == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-5)


def test_pauli_triple_robustness_value(pauli_xyz_tuple):
    t_star = jm.robustness(pauli_xyz_tuple, (1.0, 1.0, 1.0), Balanced())
    assert t_star == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-5)


def test_trivial_tuple_hits_cap(half_identity_pair):
    # Noise at any strength leaves I/2 unchanged, so the supremum is the cap.
    detail = jm.robustness_detail(half_identity_pair, (0.4, 0.4), Balanced())
    assert detail.capped
    assert detail.t_cap == pytest.approx(2.5)
    assert detail.t_star == pytest.approx(2.5, abs=1e-5)


def test_cap_never_exceeds_unit_scaling(half_identity_pair):
    # t * direction_i <= 1 always holds, so a larger explicit cap is trimmed.
    detail = jm.robustness_detail(
        half_identity_pair, (1.0, 1.0), Balanced(), t_cap=2.5)
    assert detail.t_cap == pytest.approx(1.0)
    assert detail.capped
    assert detail.t_star == pytest.approx(1.0, abs=1e-5)


def test_default_cap_is_inverse_max_direction(pauli_xz_tuple):
    detail = jm.robustness_detail(pauli_xz_tuple, (0.5, 0.25), Balanced())
    assert detail.t_cap == pytest.approx(2.0)
    assert not detail.capped


def test_explicit_cap_truncates(pauli_xz_tuple):
    detail = jm.robustness_detail(
        pauli_xz_tuple, (1.0, 1.0), Balanced(), t_cap=0.5)
    assert detail.capped
    assert detail.t_star == pytest.approx(0.5, abs=1e-6)


def test_linear_matches_balanced_for_unbiased_effects(pauli_xz_tuple):
    b = jm.robustness(pauli_xz_tuple, (1.0, 1.0), Balanced())
    l = jm.robustness(pauli_xz_tuple, (1.0, 1.0), Linear())
    assert b == pytest.approx(l, abs=1e-7)


def test_general_model_unsupported(pauli_xz_tuple):
    with pytest.raises(UnsupportedModel):
        jm.robustness(pauli_xz_tuple, (1.0, 1.0), General((0.5, 0.5)))


def test_zero_direction_rejected(pauli_xz_tuple):
    with pytest.raises(ZeroScaling):
        jm.robustness(pauli_xz_tuple, (0.0, 0.0), Balanced())


def test_robustness_monotone_in_direction():
    rng = np.random.default_rng(13)
    for seed in (21, 22, 23):
        t = random_effect_tuple(2, 2, seed=seed)
        u = rng.uniform(0.3, 1.0, size=2)
        v = u + rng.uniform(0.0, 0.5, size=2)
        tu = jm.robustness(t, u, Balanced(), t_cap=1.0 / u.max())
        tv = jm.robustness(t, v, Balanced(), t_cap=1.0 / v.max())
        assert tv <= tu + 1e-6


def test_compatible_scalings_closed_under_midpoint():
    t = random_effect_tuple(2, 2, seed=33)
    dirs = (np.array([1.0, 0.4]), np.array([0.3, 1.0]))
    points = []
    for u in dirs:
        t_star = jm.robustness(t, u, Balanced(), t_cap=1.0 / u.max())
        points.append(np.minimum(0.95 * t_star * u, 1.0))
        noisy = add_noise(t, points[-1], Balanced())
        assert jm.check_compatibility(noisy).status is jm.JmStatus.COMPATIBLE
    mid = (points[0] + points[1]) / 2.0
    noisy = add_noise(t, mid, Balanced())
    assert jm.check_compatibility(noisy).status is jm.JmStatus.COMPATIBLE


def test_symmetric_lower_bounds():
    for g, d, seed in ((2, 2, 41), (3, 2, 42), (2, 3, 43)):
        t = random_effect_tuple(g, d, seed=seed)
        t_star = jm.robustness(t, (1.0,) * g, Balanced(), t_cap=1.0)
        assert t_star >= 1.0 / g - 1e-9
        assert t_star >= 1.0 / (2.0 * d) - 1e-9


def test_unit_direction_robustness_at_least_one():
    rng = np.random.default_rng(47)
    for seed in (51, 52):
        t = random_effect_tuple(3, 3, seed=seed)
        u = rng.uniform(0.1, 1.0, size=3)
        u /= np.linalg.norm(u)
        t_star = jm.robustness(t, u, Balanced(), t_cap=1.0 / u.max())
        assert t_star >= 1.0 - 1e-5


# --- sweeps ---------------------------------------------------------------
def test_sweep_singleton_matches_robustness(pauli_xz_tuple):
    direct = jm.robustness(pauli_xz_tuple, (1.0, 1.0), Balanced())
    entries = jm.region_sweep(pauli_xz_tuple, [(1.0, 1.0)], Balanced())
    assert len(entries) == 1
    assert entries[0].direction == (1.0, 1.0)
    assert entries[0].error is None
    assert entries[0].t_star == pytest.approx(direct, abs=1e-9)


def test_sweep_empty_direction_list(pauli_xz_tuple):
    assert jm.region_sweep(pauli_xz_tuple, [], Balanced()) == []


def test_sweep_preserves_order_and_captures_errors(pauli_xz_tuple):
    dirs = [(1.0, 0.0), (0.0, 0.0), (0.0, 1.0)]
    entries = jm.region_sweep(pauli_xz_tuple, dirs, Balanced())
    assert [e.direction for e in entries] == [tuple(d) for d in dirs]
    assert entries[0].error is None and entries[2].error is None
    assert "ZeroScaling" in entries[1].error
    assert entries[1].t_star != entries[1].t_star  # NaN placeholder


def test_sweep_pauli_circle(pauli_xz_tuple):
    angles = [(k + 0.5) * math.pi / 2.0 / 64 for k in range(64)]
    dirs = [(math.cos(a), math.sin(a)) for a in angles]
    entries = jm.region_sweep(pauli_xz_tuple, dirs, Balanced())
    for entry in entries:
        assert entry.error is None
        norm = math.hypot(*entry.direction)
        assert entry.t_star * norm == pytest.approx(1.0, abs=1e-4)


# --- serialization --------------------------------------------------------
def test_verdict_json_compatible(half_identity_pair):
    verdict = jm.check_compatibility(half_identity_pair)
    doc = jm.verdict_to_json(verdict)
    assert doc["schema"] == "specjm/1"
    assert doc["status"] == "Compatible"
    assert doc["witness"]["g"] == 2
    assert len(doc["witness"]["elements"]) == 4
    json.dumps(doc)  # JSON-serializable end to end


def test_verdict_json_incompatible(pauli_xz_tuple):
    verdict = jm.check_compatibility(pauli_xz_tuple)
    doc = jm.verdict_to_json(verdict)
    assert doc["status"] == "Incompatible"
    assert "witness" not in doc
    assert doc["certificate_duals"]
    json.dumps(doc)
