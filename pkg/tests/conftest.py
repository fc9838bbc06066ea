"""Shared fixtures: Pauli matrices, canonical effect tuples, RNG helpers."""
from __future__ import annotations

import numpy as np
import pytest

from specjm import sdp
from specjm.linalg import random_hermitian
from specjm.quantum import EffectTuple

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
I2 = np.eye(2, dtype=np.complex128)


@pytest.fixture
def pauli_x() -> np.ndarray:
    return SX.copy()


@pytest.fixture
def pauli_y() -> np.ndarray:
    return SY.copy()


@pytest.fixture
def pauli_z() -> np.ndarray:
    return SZ.copy()


@pytest.fixture
def pauli_xz_tuple() -> EffectTuple:
    """Sharp X and Z qubit measurements: effects (I+sigma)/2."""
    return EffectTuple.from_matrices([(I2 + SX) / 2, (I2 + SZ) / 2])


@pytest.fixture
def pauli_xyz_tuple() -> EffectTuple:
    return EffectTuple.from_matrices(
        [(I2 + SX) / 2, (I2 + SY) / 2, (I2 + SZ) / 2])


@pytest.fixture
def half_identity_pair() -> EffectTuple:
    return EffectTuple.from_matrices([I2 / 2, I2 / 2])


def make_feasible_problem(rng: np.random.Generator, dims, m) -> sdp.SdpProblem:
    """A random minimization SDP with strictly feasible primal and dual.

    A positive-definite interior point fixes the right-hand sides, and the
    objective is built as S + sum_j y_j A_j with S positive definite, so the
    problem is bounded below and the solver must report Optimal.
    """
    def random_pd(d: int) -> np.ndarray:
        h = random_hermitian(d, rng)
        w, v = np.linalg.eigh(h)
        return (v * (np.abs(w) + 0.3)) @ v.conj().T

    xs = [random_pd(d) for d in dims]
    cons = []
    for _ in range(m):
        coeffs = {k: random_hermitian(d, rng) for k, d in enumerate(dims)}
        rhs = sum(float(np.real(np.trace(coeffs[k] @ xs[k]))) for k in coeffs)
        cons.append(sdp.Constraint(coeffs, rhs))
    y = rng.normal(size=m)
    obj = []
    for k, d in enumerate(dims):
        c = random_pd(d)
        for j, con in enumerate(cons):
            if k in con.coeffs:
                c = c + y[j] * con.coeffs[k]
        obj.append(c)
    return sdp.SdpProblem(tuple(dims), tuple(obj), tuple(cons))
