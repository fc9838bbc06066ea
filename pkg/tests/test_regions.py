"""Closed-form compatibility regions, their maps, and boundary emitters."""
from __future__ import annotations

import io
import math
from fractions import Fraction

import numpy as np
import pytest

from specjm import jm, regions
from specjm.errors import NegativeComponent, OutOfRange, ZeroScaling
from specjm.quantum import Balanced, Linear, add_noise, random_effect_tuple


# --- quarter circle -------------------------------------------------------
def test_qc_membership_examples():
    assert regions.qc_membership((1.0, 0.0, 0.0)).member
    assert regions.qc_membership((1.0, 0.0, 0.0)).margin == pytest.approx(0.0)
    g = 4
    sym = (1.0 / math.sqrt(g),) * g
    assert regions.qc_membership(sym).member
    assert regions.qc_membership(sym).margin == pytest.approx(0.0, abs=1e-12)
    out = regions.qc_membership((0.8, 0.8))
    assert not out.member
    assert out.margin == pytest.approx(-0.28, abs=1e-12)


def test_qc_membership_rejects_negative():
    with pytest.raises(NegativeComponent):
        regions.qc_membership((-0.2, 0.5))


# --- cloning region, general form -----------------------------------------
def test_clone_symmetric_boundary_examples():
    for g, d in ((2, 2), (3, 2), (2, 5), (4, 3)):
        gamma = regions.symmetric_clone_value(g, d)
        result = regions.clone_membership(g, d, (gamma,) * g)
        assert result.member
        assert abs(result.slack) <= 1e-9
    assert regions.symmetric_clone_value(2, 2) == pytest.approx(2.0 / 3.0)


def test_clone_unit_vector_exactly_on_boundary():
    for g, d in ((2, 2), (3, 3), (4, 5), (7, 20)):
        e1 = (1.0,) + (0.0,) * (g - 1)
        result = regions.clone_membership(g, d, e1)
        assert result.member
        assert result.slack == 0.0


def test_clone_perfect_double_cloning_impossible():
    result = regions.clone_membership(2, 2, (1.0, 1.0))
    assert not result.member
    assert result.slack > 0.1


def test_clone_membership_validation():
    with pytest.raises(OutOfRange):
        regions.clone_membership(2, 2, (1.2, 0.0))
    with pytest.raises(OutOfRange):
        regions.clone_membership(1, 2, (0.5,))
    with pytest.raises(OutOfRange):
        regions.clone_membership(2, 1, (0.5, 0.5))
    with pytest.raises(NegativeComponent):
        regions.clone_membership(2, 2, (-0.1, 0.5))


def test_clone_membership_truthiness():
    assert bool(regions.clone_membership(2, 2, (0.5, 0.5)))
    assert not bool(regions.clone_membership(2, 2, (1.0, 1.0)))


# --- cloning region, closed pair and triple forms --------------------------
def test_clone_pair_examples():
    assert regions.clone_pair_membership(2, 1.0, 0.0).member
    assert abs(regions.clone_pair_membership(2, 1.0, 0.0).slack) <= 1e-12
    sym = regions.symmetric_clone_value(2, 3)
    assert abs(regions.clone_pair_membership(3, sym, sym).slack) <= 1e-12
    assert not regions.clone_pair_membership(2, 0.9, 0.9).member


def test_clone_pair_matches_general_form_on_grid():
    for d in (2, 3):
        grid = np.linspace(0.0, 1.0, 30)
        for s in grid:
            for t in grid:
                pair = regions.clone_pair_membership(d, float(s), float(t))
                general = regions.clone_membership(2, d, (float(s), float(t)))
                if pair.member != general.member:
                    # disagreement is only allowed within the boundary band
                    assert abs(pair.slack) <= 1e-6


def test_clone_pair_validation():
    with pytest.raises(OutOfRange):
        regions.clone_pair_membership(2, 1.3, 0.0)
    with pytest.raises(OutOfRange):
        regions.clone_pair_membership(1, 0.5, 0.5)


def test_clone_triple_slice_examples():
    for d in (2, 4):
        sym = regions.symmetric_clone_value(3, d)
        assert abs(regions.clone_triple_slice(d, sym, sym).slack) <= 1e-9
    assert regions.clone_triple_slice(2, 1.0, 0.0).member
    assert not regions.clone_triple_slice(2, 0.9, 0.9).member


def test_clone_triple_slice_matches_general():
    rng = np.random.default_rng(2)
    for _ in range(25):
        d = int(rng.integers(2, 6))
        s, t = rng.uniform(0.0, 1.0, size=2)
        via_slice = regions.clone_triple_slice(d, float(s), float(t))
        general = regions.clone_membership(3, d, (float(s), float(t), float(t)))
        assert via_slice.member == general.member
        assert via_slice.slack == pytest.approx(general.slack, abs=1e-12)


def test_clone_region_midpoint_convexity():
    rng = np.random.default_rng(8)
    found = 0
    while found < 40:
        g = int(rng.integers(2, 5))
        d = int(rng.integers(2, 6))
        a = rng.uniform(0.0, 1.0, size=g)
        b = rng.uniform(0.0, 1.0, size=g)
        if not (regions.clone_membership(g, d, a).member
                and regions.clone_membership(g, d, b).member):
            continue
        mid = (a + b) / 2.0
        assert regions.clone_membership(g, d, mid).member
        found += 1


# --- scalar maps and values -----------------------------------------------
def test_f_map_values():
    assert regions.f_map((1.0, 1.0)) == (1.0, 1.0)
    assert regions.f_map((0.0,)) == (0.0,)
    assert regions.f_map((2.0 / 3.0,))[0] == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(OutOfRange):
        regions.f_map((1.2,))
    rng = np.random.default_rng(3)
    s = rng.uniform(0.0, 1.0, size=6)
    out = regions.f_map(s)
    assert all(0.0 <= v <= 1.0 for v in out)


def test_symmetric_clone_value_formula():
    assert regions.symmetric_clone_value(2, 2) == pytest.approx(2.0 / 3.0)
    assert regions.symmetric_clone_value(1, 7) == pytest.approx(1.0)
    assert regions.symmetric_clone_value(10**6, 4) == pytest.approx(
        1.0 / 5.0, abs=1e-5)
    assert regions.symmetric_clone_value(3, 5) == pytest.approx(8.0 / 18.0)


def test_zhu_region_scale_values():
    assert regions.zhu_region_scale(3, 2) == pytest.approx(1.0)
    assert regions.zhu_region_scale(2, 5) == pytest.approx(2.0)
    assert regions.zhu_region_scale(4, 1) == 0.0


# --- exact-arithmetic comparisons -----------------------------------------
def test_symmetric_value_vs_quarter_circle_crossover():
    """gamma(g,d) > 1/sqrt(g) iff d^2 < g, with equality exactly at g = d^2.

    Compared in exact rational arithmetic: gamma > 1/sqrt(g) iff
    g * gamma^2 > 1 since both sides are positive.
    """
    for g in range(2, 101):
        for d in range(2, 21):
            gamma = Fraction(g + d, g * (1 + d))
            lhs = g * gamma * gamma
            if d * d < g:
                assert lhs > 1
            elif d * d == g:
                assert lhs == 1
            else:
                assert lhs < 1


def test_symmetric_value_at_double_dim_below_best_bound():
    """(g+2d)/(g(1+2d)) never beats max(1/sqrt(g), 1/(2d)), exactly."""
    for g in range(2, 51):
        for d in range(2, 51):
            value = Fraction(g + 2 * d, g * (1 + 2 * d))
            beats_half_dim = value > Fraction(1, 2 * d)
            beats_qc = g * value * value > 1
            assert not (beats_half_dim and beats_qc)


# --- instance-level chains ------------------------------------------------
def test_f_map_chain_on_instances():
    for seed in (5, 6, 7):
        t = random_effect_tuple(2, 2, seed=seed)
        lin = jm.robustness(t, (1.0, 1.0), Linear(), t_cap=1.0)
        s = min(0.95 * lin, 1.0)
        assert jm.check_compatibility(
            add_noise(t, (s, s), Linear())).status is jm.JmStatus.COMPATIBLE
        fs = regions.f_map((s, s))
        assert jm.check_compatibility(
            add_noise(t, fs, Balanced())).status is jm.JmStatus.COMPATIBLE


def test_clone_region_certified_by_robustness():
    rng = np.random.default_rng(9)
    for seed in (12, 13, 14):
        t = random_effect_tuple(2, 2, seed=seed)  # d = 2, so clone g, 2d = 4
        gamma = regions.symmetric_clone_value(2, 4)
        points = [np.array([gamma, gamma])]
        for _ in range(2):
            s = rng.uniform(0.05, 1.0, size=2)
            if regions.clone_membership(2, 4, s).member:
                points.append(s)
        for s in points:
            assert regions.clone_membership(2, 4, s).member
            t_star = jm.robustness(t, s, Balanced(), t_cap=1.0)
            assert t_star >= 1.0 - 1e-5


# --- boundary emitters ----------------------------------------------------
def test_angular_directions():
    dirs = regions.angular_directions(8)
    assert len(dirs) == 8
    for u, v in dirs:
        assert u > 0.0 and v > 0.0
        assert math.hypot(u, v) == pytest.approx(1.0, abs=1e-12)
    assert dirs[0][0] > dirs[-1][0]  # sweeps from the u-axis to the v-axis


def test_boundary_rows_qc_unit_norm():
    dirs = regions.angular_directions(5)
    rows = regions.region_boundary_rows(regions.RegionKind.QC, 2, 2, dirs)
    assert len(rows) == 5
    for (u, v), row in zip(dirs, rows):
        assert row[:2] == (u, v)
        assert row[2] == pytest.approx(1.0, abs=1e-12)


def test_boundary_rows_simplex_limit():
    rows = regions.region_boundary_rows(
        regions.RegionKind.SIMPLEX_LIMIT, 3, 2,
        [(1.0, 1.0, 1.0), (0.5, 0.25, 0.25)])
    assert rows[0][3] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert rows[1][3] == pytest.approx(1.0, abs=1e-12)


def test_boundary_rows_clone_general_matches_symmetric_value():
    rows = regions.region_boundary_rows(
        regions.RegionKind.CLONE_GENERAL, 2, 2, [(1.0, 1.0)])
    gamma = regions.symmetric_clone_value(2, 2)
    assert rows[0][2] == pytest.approx(gamma, abs=1e-9)


def test_boundary_rows_symmetric_value_single_row():
    rows = regions.region_boundary_rows(
        regions.RegionKind.CLONE_SYMMETRIC_VALUE, 3, 4,
        [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)])
    assert len(rows) == 1
    assert rows[0][:3] == (1.0, 1.0, 1.0)
    assert rows[0][3] == pytest.approx(regions.symmetric_clone_value(3, 4))


def test_boundary_rows_validation():
    with pytest.raises(OutOfRange):
        regions.region_boundary_rows(
            regions.RegionKind.QC, 2, 2, [(-1.0, 0.5)])
    with pytest.raises(ZeroScaling):
        regions.region_boundary_rows(
            regions.RegionKind.QC, 2, 2, [(0.0, 0.0)])


def test_boundary_csv_output():
    dirs = regions.angular_directions(3)
    text = regions.boundary_csv(regions.RegionKind.QC, 2, 2, dirs)
    lines = text.splitlines()
    assert lines[0] == "u1,u2,t_star,kind"
    assert len(lines) == 4
    assert text.endswith("\n")
    again = regions.boundary_csv(regions.RegionKind.QC, 2, 2, dirs)
    assert text == again
    for line in lines[1:]:
        fields = line.split(",")
        assert fields[-1] == "QC"
        float(fields[0]), float(fields[1]), float(fields[2])
