import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import KET_0, KET_F2, KET_M, KET_P, R2, oracle_fid, oracle_u
from spinbrach import (
    DomainError,
    FieldDirection,
    StateVector,
    analytic_state_minus,
    analytic_state_zero,
    closed_form_propagator,
    evolve,
    sample_trajectory,
    scalar_exp_identity,
    spectral_propagator,
)
from spinbrach.propagator import evolve_many, zero_state_gamma_z, zero_state_span_form

thetas = st.floats(0.0, math.pi)
phis = st.floats(0.0, 2 * math.pi, exclude_max=True)
phases = st.floats(0.0, 4 * math.pi)


def assert_same_ray(u, v, tol=1e-12):
    assert oracle_fid(np.asarray(u), np.asarray(v)) == pytest.approx(1.0, abs=tol)


@settings(max_examples=300)
@given(thetas, phis, phases)
def test_closed_form_matches_independent_exponential(theta, phi, wt):
    d = FieldDirection(theta, phi)
    cf = closed_form_propagator(d, wt)
    assert np.max(np.abs(cf.matrix - oracle_u(theta, phi, wt))) < 1e-12
    assert np.max(np.abs(cf.matrix - spectral_propagator(d, wt).matrix)) < 1e-12
    assert cf.unitarity_error() < 1e-12
    assert abs(abs(np.linalg.det(cf.matrix)) - 1.0) < 1e-12


@pytest.mark.parametrize("fn", [closed_form_propagator, spectral_propagator])
def test_identity_at_zero(fn):
    np.testing.assert_allclose(fn(FieldDirection(1.1, 2.2), 0.0).matrix, np.eye(3), atol=1e-15)


def test_propagator_examples():
    np.testing.assert_allclose(closed_form_propagator(FieldDirection(0, 0), math.pi).matrix,
                               np.diag([-1, 1, -1]), atol=1e-15)
    np.testing.assert_allclose(spectral_propagator(FieldDirection(math.pi / 2, 0), 2 * math.pi).matrix,
                               np.eye(3), atol=1e-12)
    np.testing.assert_allclose(spectral_propagator(FieldDirection(0, 0), math.pi / 2).matrix,
                               np.diag([-1j, 1, 1j]), atol=1e-15)


@settings(max_examples=100)
@given(thetas, phis, phases, phases)
def test_group_law_and_period(theta, phi, a, b):
    d = FieldDirection(theta, phi)
    ua, ub = closed_form_propagator(d, a), closed_form_propagator(d, b)
    assert np.max(np.abs((ua @ ub) - closed_form_propagator(d, a + b).matrix)) < 1e-12
    assert np.max(np.abs(closed_form_propagator(d, a + 2 * math.pi).matrix - ua.matrix)) < 1e-12


def test_large_phase_is_reduced():
    d = FieldDirection(0.7, 0.3)
    big = 2 * math.pi * 10 ** 7 + 0.4
    np.testing.assert_allclose(closed_form_propagator(d, big).matrix,
                               closed_form_propagator(d, 0.4).matrix, atol=1e-8)


@pytest.mark.parametrize("lam", [-1, 0, 1])
def test_scalar_identity(lam, rng):
    for x in rng.normal(size=50) + 1j * rng.normal(size=50):
        assert abs(scalar_exp_identity(lam, x) - cmath.exp(lam * x)) < 1e-13


@pytest.mark.parametrize("lam", [2, -2, 0.5, True])
def test_scalar_identity_domain(lam):
    with pytest.raises(DomainError):
        scalar_exp_identity(lam, 1.0)


@pytest.mark.parametrize("psi,d,wt,expected", [
    (KET_M, (math.pi / 2, 0.0), math.pi, [-1, 0, 0]),
    (KET_0, (math.pi / 2, math.pi / 2), math.pi / 2, [-1 / R2, 0, 1 / R2]),
])
def test_evolve_examples(psi, d, wt, expected):
    out = evolve(psi, FieldDirection(*d), 1.0, wt)
    np.testing.assert_allclose(out.components, expected, atol=1e-15)


def test_evolve_zero_time_and_domain():
    psi = StateVector([0.6, 0.0, 0.8j])
    np.testing.assert_array_equal(evolve(psi, FieldDirection(1, 1), 2.0, 0.0).components, psi.components)
    with pytest.raises(DomainError):
        evolve(psi, FieldDirection(1, 1), 0.0, 1.0)
    with pytest.raises(DomainError):
        evolve(psi, FieldDirection(1, 1), 1.0, -1.0)


def test_evolve_scales_with_omega():
    psi = StateVector([0.6, 0.0, 0.8j])
    d = FieldDirection(0.4, 2.0)
    np.testing.assert_allclose(evolve(psi, d, 2.0, 0.75).components, evolve(psi, d, 1.0, 1.5).components,
                               atol=1e-15)


@pytest.mark.parametrize("args,expected", [
    ((0.3, 1.2, 0.0), [0, 0, 1]),
    ((math.pi / 2, 0.0, math.pi), [-1, 0, 0]),
    ((math.pi / 2, 0.0, math.pi / 2), [-0.5, -1j / R2, 0.5]),
])
def test_analytic_minus_examples(args, expected):
    np.testing.assert_allclose(analytic_state_minus(*args).components, expected, atol=1e-15)


@pytest.mark.parametrize("args,expected", [
    ((0.3, 1.2, 0.0), [0, 1, 0]),
    ((math.pi / 2, math.pi / 2, math.pi / 2), [-1 / R2, 0, 1 / R2]),
    ((math.pi / 2, math.pi / 2, math.pi / 4), [-0.5, R2 / 2, 0.5]),
])
def test_analytic_zero_examples(args, expected):
    np.testing.assert_allclose(analytic_state_zero(*args).components, expected, atol=1e-15)


@settings(max_examples=300)
@given(thetas, phis, phases)
def test_analytic_states_match_oracle_evolution(theta, phi, wt):
    u = oracle_u(theta, phi, wt)
    np.testing.assert_allclose(analytic_state_minus(theta, phi, wt).components, u @ KET_M, atol=1e-12)
    np.testing.assert_allclose(analytic_state_zero(theta, phi, wt).components, u @ KET_0, atol=1e-12)
    gamma, z = zero_state_gamma_z(theta, phi, wt)
    assert abs(abs(z) ** 2 - 2 * gamma * (1 - gamma)) < 1e-12


@settings(max_examples=100)
@given(thetas, phis, st.floats(0.01, 2 * math.pi - 0.01))
def test_span_form_needs_flipped_sign(theta, phi, wt):
    direct = analytic_state_zero(theta, phi, wt).components
    np.testing.assert_allclose(zero_state_span_form(theta, phi, wt, first_sign=-1.0), direct, atol=1e-12)


def test_span_form_as_printed_differs():
    direct = analytic_state_zero(1.0, 0.5, 1.3).components
    assert np.max(np.abs(zero_state_span_form(1.0, 0.5, 1.3) - direct)) > 0.1


def test_sample_trajectory_basics():
    d = FieldDirection(math.pi / 2, 0.0)
    tr = sample_trajectory(KET_M, d, 1.0, math.pi, 101)
    assert len(tr) == 101
    assert tr.times[0] == 0.0 and tr.times[-1] == math.pi
    np.testing.assert_array_equal(tr.states[0].components, KET_M)
    assert oracle_fid(tr.states[-1].components, KET_P) == pytest.approx(1.0, abs=1e-12)
    two = sample_trajectory(KET_M, d, 1.0, 2.0, 2)
    np.testing.assert_array_equal(two.times, [0.0, 2.0])
    # each sample is independent of the grid density
    fine = sample_trajectory(KET_M, d, 1.0, 2.0, 1001)
    np.testing.assert_allclose(fine.states[-1].components, two.states[-1].components, atol=1e-15)


@pytest.mark.parametrize("n,t_end,omega", [(1, 1.0, 1.0), (5, 0.0, 1.0), (5, 1.0, 0.0)])
def test_sample_trajectory_domain(n, t_end, omega):
    with pytest.raises(DomainError):
        sample_trajectory(KET_M, FieldDirection(1, 1), omega, t_end, n)


def test_raw_rows_conserve_norm(rng):
    for _ in range(50):
        theta, phi = rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
        psi = rng.normal(size=3) + 1j * rng.normal(size=3)
        psi /= np.linalg.norm(psi)
        rows = evolve_many(psi, FieldDirection(theta, phi), np.linspace(0, 4 * math.pi, 1001))
        assert np.max(np.abs(np.linalg.norm(rows, axis=1) - 1.0)) < 1e-12
