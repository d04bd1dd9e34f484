import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import KET_0, KET_F2, KET_M, R2, SX, SY, SZ, n_dot_s
from spinbrach import (
    CanonicalState,
    DomainError,
    FieldDirection,
    NormalizationError,
    StateVector,
    canonicalize,
    direction_to_unit,
    fidelity,
    inner_product,
    spin_matrices,
    spin_projection,
)

thetas = st.floats(0.0, math.pi)
phis = st.floats(-10.0, 10.0)


def test_spin_matrices_match_literal_tables():
    sx, sy, sz = spin_matrices()
    np.testing.assert_array_equal(sz, np.diag([1, 0, -1]))
    np.testing.assert_allclose(sx, SX, atol=1e-16)
    np.testing.assert_allclose(sy, SY, atol=1e-16)


def test_spin_algebra_relations():
    sx, sy, sz = spin_matrices()
    for m in (sx, sy, sz):
        assert np.max(np.abs(m - m.conj().T)) < 1e-14
    assert np.max(np.abs(sx @ sy - sy @ sx - 1j * sz)) < 1e-14
    assert np.max(np.abs(sx @ sx + sy @ sy + sz @ sz - 2 * np.eye(3))) < 1e-14


def test_spin_matrices_are_read_only():
    sx, _, _ = spin_matrices()
    with pytest.raises(ValueError):
        sx[0, 0] = 1.0


@pytest.mark.parametrize("theta,phi,expected", [
    (0.0, 0.0, (0, 0, 1)),
    (math.pi / 2, 0.0, (1, 0, 0)),
    (math.pi / 2, math.pi / 2, (0, 1, 0)),
])
def test_direction_to_unit_examples(theta, phi, expected):
    np.testing.assert_allclose(direction_to_unit(FieldDirection(theta, phi)), expected, atol=1e-16)


@given(thetas, phis)
def test_unit_vector_norm(theta, phi):
    assert abs(np.linalg.norm(direction_to_unit(FieldDirection(theta, phi))) - 1.0) < 1e-15


def test_direction_validation_and_wrap():
    with pytest.raises(DomainError):
        FieldDirection(-0.1, 0.0)
    with pytest.raises(DomainError):
        FieldDirection(math.pi + 1e-6, 0.0)
    with pytest.raises(DomainError):
        FieldDirection(float("nan"), 0.0)
    d = FieldDirection(1.0, -math.pi / 2)
    assert d.phi == pytest.approx(1.5 * math.pi)
    assert 0.0 <= FieldDirection(1.0, 2 * math.pi).phi < 2 * math.pi


def test_spin_projection_examples():
    np.testing.assert_allclose(spin_projection(FieldDirection(0.0, 0.0)), SZ, atol=1e-16)
    np.testing.assert_allclose(spin_projection(FieldDirection(math.pi / 2, 0.0)), SX, atol=1e-16)


@settings(max_examples=200)
@given(thetas, phis)
def test_spin_projection_properties(theta, phi):
    ns = spin_projection(FieldDirection(theta, phi))
    np.testing.assert_allclose(ns, n_dot_s(theta, FieldDirection(theta, phi).phi), atol=1e-15)
    assert np.max(np.abs(ns - ns.conj().T)) < 1e-15
    assert abs(np.trace(ns)) < 1e-15
    assert np.max(np.abs(ns @ ns @ ns - ns)) < 1e-12
    np.testing.assert_allclose(np.linalg.eigvalsh(ns), [-1, 0, 1], atol=1e-12)


def test_state_vector_validation():
    with pytest.raises(NormalizationError):
        StateVector([0.5, 0, 0])
    with pytest.raises(DomainError):
        StateVector([float("nan"), 0, 0])
    with pytest.raises(DomainError):
        StateVector([1, 0])
    v = StateVector([1 + 5e-10, 0, 0])
    assert np.linalg.norm(v.components) == pytest.approx(1.0, abs=1e-15)
    assert not v.components.flags.writeable
    w = StateVector([3, 4j, 0], normalize=True)
    np.testing.assert_allclose(w.components, [0.6, 0.8j, 0])


def test_basis_ordering():
    np.testing.assert_array_equal(StateVector.basis(-1).components, KET_M)
    np.testing.assert_array_equal(StateVector.basis(0).components, KET_0)
    with pytest.raises(DomainError):
        StateVector.basis(2)


def test_inner_product_and_fidelity_examples():
    e1, e3 = StateVector.basis(1), StateVector.basis(-1)
    assert inner_product(e1, e1) == 1
    assert inner_product(e1, e3) == 0
    assert inner_product(KET_0, KET_F2) == 0
    assert fidelity(KET_M, [-1, 0, 0]) == 0
    psi = StateVector([0.6, 0.0, 0.8j])
    assert fidelity(psi, psi.phase_shifted(math.pi / 3)) == pytest.approx(1.0, abs=1e-15)
    # conjugate-linear in the first slot
    assert inner_product([1j, 0, 0], [1, 0, 0]) == pytest.approx(-1j)


@pytest.mark.parametrize("vec,moduli,phases", [
    ([1j, 0, 0], (1, 0, 0), (0, 0)),
    ([0, 0, 1], (0, 0, 1), (0, 0)),
    (np.array([0.5, cmath.exp(1j * math.pi / 4) / R2, 0.5]) * cmath.exp(1j * math.pi / 7),
     (0.5, 1 / R2, 0.5), (math.pi / 4, 0.0)),
])
def test_canonicalize_examples(vec, moduli, phases):
    c = canonicalize(vec)
    np.testing.assert_allclose(c.moduli, moduli, atol=1e-15)
    np.testing.assert_allclose(c.relative_phases, phases, atol=1e-15)


def test_canonical_reference_falls_back_when_first_is_zero():
    c = canonicalize([0, 1j / R2, -1 / R2])
    assert c.reference_index == 1
    # third phase measured from the second component: pi - pi/2
    assert c.relative_phases[1] == pytest.approx(math.pi / 2)


@settings(max_examples=200)
@given(st.lists(st.floats(-1, 1), min_size=6, max_size=6))
def test_canonicalize_roundtrip(xs):
    v = np.array(xs[:3]) + 1j * np.array(xs[3:])
    if np.linalg.norm(v) < 1e-3:
        return
    v = v / np.linalg.norm(v)
    c = canonicalize(v)
    assert isinstance(c, CanonicalState)
    assert sum(m * m for m in c.moduli) == pytest.approx(1.0, abs=1e-12)
    assert all(0.0 <= p < 2 * math.pi for p in c.relative_phases)
    assert fidelity(c.to_state(), v) == pytest.approx(1.0, abs=1e-12)
