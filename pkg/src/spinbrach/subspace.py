"""Distance of a trajectory from the plane spanned by its end states."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .errors import DegenerateSpanError, DomainError
from .propagator import Trajectory
from .spin_algebra import StateLike, StateVector, as_state, fidelity, inner_product


@dataclass(frozen=True)
class SpanBasis:
    """Orthonormal pair spanning ``span{psi_i, psi_f}``; ``e1`` is ``psi_i``."""

    e1: StateVector
    e2: StateVector

    def matrix(self) -> np.ndarray:
        return np.stack([self.e1.components, self.e2.components])


@dataclass(frozen=True)
class ResidualProfile:
    times: np.ndarray
    residuals: np.ndarray
    max_residual: float
    argmax_t: float

    @property
    def samples(self) -> List[Tuple[float, float]]:
        return list(zip(self.times.tolist(), self.residuals.tolist()))


def orthonormal_span(psi_i: StateLike, psi_f: StateLike) -> SpanBasis:
    """Gram-Schmidt on ``(psi_i, psi_f)``."""
    e1 = as_state(psi_i)
    f = as_state(psi_f)
    if fidelity(e1, f) >= 1.0 - 1e-12:
        raise DegenerateSpanError("initial and final states are parallel")
    rest = f.components - inner_product(e1, f) * e1.components
    return SpanBasis(e1, StateVector(rest, normalize=True))


def _residuals(states: np.ndarray, basis: SpanBasis) -> np.ndarray:
    # norm of the rejection equals sqrt(1 - |<e1|psi>|^2 - |<e2|psi>|^2) for unit psi,
    # but keeps relative accuracy when the state is nearly in the span
    m = basis.matrix()
    rejection = states - (states @ m.conj().T) @ m
    return np.clip(np.linalg.norm(rejection, axis=-1), 0.0, 1.0)


def projection_residual(psi: StateLike, basis: SpanBasis) -> float:
    """``sqrt(1 - |<e1|psi>|^2 - |<e2|psi>|^2)``, clamped to ``[0, 1]``."""
    return float(_residuals(as_state(psi).components[None, :], basis)[0])


def trajectory_residual_profile(traj: Trajectory, basis: SpanBasis) -> ResidualProfile:
    if len(traj) == 0:
        raise DomainError("trajectory is empty")
    res = _residuals(traj.as_array(), basis)
    k = int(np.argmax(res))
    return ResidualProfile(np.asarray(traj.times, dtype=float), res, float(res[k]), float(traj.times[k]))


def in_span_probability(psi: StateLike, basis: SpanBasis) -> float:
    v = as_state(psi)
    return abs(inner_product(basis.e1, v)) ** 2 + abs(inner_product(basis.e2, v)) ** 2


def example2_profile(theta: float, delta_omega: float = 2.0, samples: int = 1001) -> ResidualProfile:
    """Residual profile from ``(0, 1, 0)`` to ``(-1, 0, 1)/sqrt(2)`` along the
    analytic solution at polar angle ``theta``."""
    from .brachistochrone import solve_example2
    from .propagator import sample_trajectory

    sol = solve_example2(delta_omega, theta)
    psi_i = StateVector.basis(0)
    psi_f = StateVector([-1.0 / math.sqrt(2.0), 0.0, 1.0 / math.sqrt(2.0)])
    traj = sample_trajectory(psi_i, sol.direction, 0.5 * delta_omega, sol.t_star, samples)
    return trajectory_residual_profile(traj, orthonormal_span(psi_i, psi_f))
