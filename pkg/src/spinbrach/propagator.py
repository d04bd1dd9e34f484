"""Exact time evolution under ``H = hbar * omega * (n . s)``.

Two independent routes to ``U = exp(-i omega t (n . s))`` are provided:
``closed_form_propagator`` uses the algebraic identity valid for an
operator with spectrum {-1, 0, 1}; ``spectral_propagator`` diagonalizes
``n . s`` numerically and serves as the oracle for the former.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .errors import DiagonalizationError, DomainError
from .spin_algebra import (
    SQRT2,
    TWO_PI,
    FieldDirection,
    StateLike,
    StateVector,
    as_state,
    spin_projection,
)

_I3 = np.eye(3, dtype=np.complex128)
_REDUCE_ABOVE = 1e6


def _reduce_phase(omega_t: float) -> float:
    if abs(omega_t) > _REDUCE_ABOVE:
        return math.fmod(omega_t, TWO_PI)
    return omega_t


@dataclass(frozen=True)
class Propagator:
    """Unitary evolution operator for a fixed direction and phase ``omega*t``."""

    matrix: np.ndarray
    omega_t: float
    direction: FieldDirection

    def __matmul__(self, other):
        if isinstance(other, Propagator):
            return self.matrix @ other.matrix
        if isinstance(other, StateVector):
            return StateVector(self.matrix @ other.components, normalize=True)
        return self.matrix @ other

    def __array__(self, dtype=None, copy=None):
        return np.array(self.matrix, dtype=dtype)

    def unitarity_error(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - _I3)))


def closed_form_propagator(direction: FieldDirection, omega_t: float) -> Propagator:
    """``1 - 2 sin^2(wt/2) (n.s)^2 - i sin(wt) (n.s)``."""
    wt = _reduce_phase(float(omega_t))
    ns = spin_projection(direction)
    half = math.sin(0.5 * wt)
    u = _I3 - (2.0 * half * half) * (ns @ ns) - 1j * math.sin(wt) * ns
    return Propagator(u, float(omega_t), direction)


def spectral_propagator(direction: FieldDirection, omega_t: float) -> Propagator:
    """Propagator from the numerical eigendecomposition of ``n . s``.

    Independent of the closed form: eigenphases ``exp(-i lam wt)`` are applied
    to the numerically computed eigenvectors.
    """
    wt = _reduce_phase(float(omega_t))
    ns = spin_projection(direction)
    try:
        lam, vecs = np.linalg.eigh(ns)
    except np.linalg.LinAlgError as exc:
        raise DiagonalizationError(str(exc)) from exc
    if not np.all(np.isfinite(lam)):
        raise DiagonalizationError("non-finite eigenvalues")
    u = (vecs * np.exp(-1j * lam * wt)) @ vecs.conj().T
    return Propagator(u, float(omega_t), direction)


def scalar_exp_identity(lam: int, x: complex) -> complex:
    """Three-term expansion of ``exp(lam * x)`` exact for ``lam`` in {-1, 0, 1}."""
    if lam not in (-1, 0, 1) or isinstance(lam, bool):
        raise DomainError(f"lambda must be -1, 0 or 1, got {lam!r}")
    x = complex(x)
    return ((1 - lam) * (1 + lam)
            + 0.5 * lam * (lam + 1) * cmath.exp(x)
            + 0.5 * lam * (lam - 1) * cmath.exp(-x))


def evolve(psi_i: StateLike, direction: FieldDirection, omega: float, t: float) -> StateVector:
    """State at time ``t`` starting from ``psi_i``."""
    if omega <= 0:
        raise DomainError("omega must be positive")
    if t < 0:
        raise DomainError("t must be nonnegative")
    psi = as_state(psi_i)
    u = closed_form_propagator(direction, omega * t).matrix
    return StateVector(u @ psi.components, normalize=True)


def analytic_state_minus(theta: float, phi: float, omega_t: float) -> StateVector:
    """Evolved state starting from the ``m = -1`` eigenstate ``(0, 0, 1)``."""
    st, ct = math.sin(theta), math.cos(theta)
    s2 = math.sin(0.5 * omega_t) ** 2
    sn = math.sin(omega_t)
    e1 = cmath.exp(-1j * phi)
    a = -e1 * e1 * st * st * s2
    b = SQRT2 * e1 * ct * st * s2 - (1j / SQRT2) * e1 * st * sn
    c = 1.0 - (1.0 + ct * ct) * s2 + 1j * ct * sn
    return StateVector([a, b, c], normalize=True)


def zero_state_gamma_z(theta: float, phi: float, omega_t: float) -> Tuple[float, complex]:
    """``gamma = sin^2(theta) sin^2(wt/2)`` and the amplitude ``z`` of the m=-1 component
    for evolution from ``(0, 1, 0)``."""
    st, ct = math.sin(theta), math.cos(theta)
    s2 = math.sin(0.5 * omega_t) ** 2
    gamma = st * st * s2
    z = cmath.exp(1j * phi) * (2.0 * ct * st * s2 - 1j * st * math.sin(omega_t)) / SQRT2
    return gamma, z


def analytic_state_zero(theta: float, phi: float, omega_t: float) -> StateVector:
    """Evolved state ``(-z*, 1 - 2 gamma, z)`` starting from ``(0, 1, 0)``."""
    gamma, z = zero_state_gamma_z(theta, phi, omega_t)
    return StateVector([-z.conjugate(), 1.0 - 2.0 * gamma, z], normalize=True)


def zero_state_span_form(theta: float, phi: float, omega_t: float, first_sign: float = 1.0) -> np.ndarray:
    """Evolution from ``(0, 1, 0)`` written as ``(1 - 2 gamma)(0, 1, 0)`` plus
    ``sqrt(2 gamma (1 - gamma)) (s e^{-i(phi - alpha)}, 0, e^{i(phi - alpha)})``.

    ``first_sign`` is the sign ``s`` on the m=+1 entry. Matching the direct
    evolution requires ``s = -1``; the default ``+1`` reproduces the form
    as usually printed so the two can be compared.
    """
    gamma, _ = zero_state_gamma_z(theta, phi, omega_t)
    half = 0.5 * omega_t
    alpha = math.atan2(math.cos(half), math.cos(theta) * math.sin(half))
    amp = math.sqrt(max(2.0 * gamma * (1.0 - gamma), 0.0))
    ph = cmath.exp(1j * (phi - alpha))
    return np.array([first_sign * amp * ph.conjugate(), 1.0 - 2.0 * gamma, amp * ph])


@dataclass(frozen=True)
class Trajectory:
    """Samples ``(t, state)`` of one evolution, strictly increasing in ``t``."""

    times: np.ndarray
    states: Tuple[StateVector, ...]
    direction: FieldDirection
    omega: float

    def __post_init__(self):
        if len(self.times) != len(self.states) or len(self.times) == 0:
            raise DomainError("trajectory needs matching, nonempty times and states")
        if np.any(np.diff(self.times) <= 0):
            raise DomainError("trajectory times must be strictly increasing")

    @property
    def samples(self) -> List[Tuple[float, StateVector]]:
        return list(zip(self.times.tolist(), self.states))

    def as_array(self) -> np.ndarray:
        """States stacked into an ``(n, 3)`` complex array."""
        return np.stack([s.components for s in self.states])

    def __len__(self) -> int:
        return len(self.states)


def evolve_many(psi_i: StateLike, direction: FieldDirection, omega_t: np.ndarray) -> np.ndarray:
    """Closed-form evolution at many phases at once; returns an ``(n, 3)`` array.

    Rows are not renormalized, so their norms expose the propagator's roundoff.
    """
    psi = as_state(psi_i).components
    ns = spin_projection(direction)
    v1 = ns @ psi
    v2 = ns @ v1
    wt = np.asarray(omega_t, dtype=np.float64)
    wt = np.where(np.abs(wt) > _REDUCE_ABOVE, np.fmod(wt, TWO_PI), wt)
    s2 = np.sin(0.5 * wt) ** 2
    return psi[None, :] - (2.0 * s2)[:, None] * v2[None, :] - 1j * np.sin(wt)[:, None] * v1[None, :]


def sample_trajectory(psi_i: StateLike, direction: FieldDirection, omega: float,
                      t_end: float, n_samples: int) -> Trajectory:
    """Uniform samples on ``[0, t_end]``, each evaluated directly from ``t = 0``."""
    if n_samples < 2:
        raise DomainError("n_samples must be at least 2")
    if t_end <= 0:
        raise DomainError("t_end must be positive")
    if omega <= 0:
        raise DomainError("omega must be positive")
    psi = as_state(psi_i)
    times = np.linspace(0.0, float(t_end), int(n_samples))
    arr = evolve_many(psi, direction, omega * times)
    states = tuple(StateVector(row) for row in arr)
    return Trajectory(times, states, direction, float(omega))
