"""Spin-1 operators, state vectors and field-direction geometry.

States are stored in the eigenbasis of ``s_z`` ordered by magnetic quantum
number ``m = +1, 0, -1``; index 2 is therefore the ``m = -1`` state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Tuple, Union

import numpy as np

from .errors import DomainError, NormalizationError

SQRT2 = math.sqrt(2.0)
TWO_PI = 2.0 * math.pi

#: input norm tolerance; states are renormalized exactly after the check
NORM_TOL = 1e-9
#: modulus below which a component carries no usable phase
PHASE_FLOOR = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


_SX = _readonly(np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=np.complex128) / SQRT2)
_SY = _readonly(np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=np.complex128) / SQRT2)
_SZ = _readonly(np.diag([1.0, 0.0, -1.0]).astype(np.complex128))


def spin_matrices() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(s_x, s_y, s_z)`` for spin 1 with ``s_z = diag(1, 0, -1)``.

    The returned arrays are read-only views shared across calls.
    """
    return _SX, _SY, _SZ


class StateVector:
    """Normalized three-component spin-1 state.

    Parameters
    ----------
    components : array_like
        Three complex amplitudes ordered ``(m=+1, m=0, m=-1)``.
    normalize : bool
        If False the input norm must already be 1 within ``NORM_TOL``;
        if True any nonzero finite vector is scaled to unit norm.
    """

    __slots__ = ("_c",)

    def __init__(self, components, normalize: bool = False):
        c = np.array(components, dtype=np.complex128).reshape(-1)
        if c.shape != (3,):
            raise DomainError(f"state needs 3 components, got {c.size}")
        if not np.all(np.isfinite(c)):
            raise DomainError("state components must be finite")
        norm = float(np.linalg.norm(c))
        if normalize:
            if norm == 0.0:
                raise NormalizationError("cannot normalize the zero vector")
        elif abs(norm - 1.0) > NORM_TOL:
            raise NormalizationError(f"state norm {norm!r} differs from 1 by more than {NORM_TOL}")
        self._c = _readonly(c / norm)

    @property
    def components(self) -> np.ndarray:
        return self._c

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._c.copy()
        return self._c.astype(dtype)

    def __getitem__(self, i):
        return self._c[i]

    def __len__(self) -> int:
        return 3

    def __iter__(self):
        return iter(self._c)

    def __repr__(self) -> str:
        return f"StateVector({self._c.tolist()!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return bool(np.array_equal(self._c, other._c))

    def __hash__(self) -> int:
        return hash(self._c.tobytes())

    @classmethod
    def basis(cls, m: int) -> "StateVector":
        """Eigenstate of ``s_z`` with eigenvalue ``m`` in {+1, 0, -1}."""
        if m not in (1, 0, -1):
            raise DomainError(f"m must be one of +1, 0, -1, got {m}")
        c = np.zeros(3, dtype=np.complex128)
        c[1 - m] = 1.0
        return cls(c)

    def phase_shifted(self, phase: float) -> "StateVector":
        return StateVector(self._c * np.exp(1j * phase))


StateLike = Union[StateVector, Iterable[complex], np.ndarray]


def as_state(v: StateLike) -> StateVector:
    return v if isinstance(v, StateVector) else StateVector(v)


@dataclass(frozen=True)
class FieldDirection:
    """Field direction given by polar angle ``theta`` and azimuth ``phi``.

    ``theta`` must lie in ``[0, pi]``; ``phi`` is reduced into ``[0, 2 pi)``.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta)
        phi = float(self.phi)
        if not (math.isfinite(theta) and math.isfinite(phi)):
            raise DomainError("field angles must be finite")
        if theta < -1e-12 or theta > math.pi + 1e-12:
            raise DomainError(f"theta={theta!r} outside [0, pi]")
        theta = min(max(theta, 0.0), math.pi)
        phi = math.fmod(phi, TWO_PI)
        if phi < 0.0:
            phi += TWO_PI
        if phi >= TWO_PI:
            phi = 0.0
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @property
    def unit_vector(self) -> np.ndarray:
        return direction_to_unit(self)


def direction_to_unit(d: FieldDirection) -> np.ndarray:
    """Cartesian unit vector ``(sin t cos p, sin t sin p, cos t)``."""
    st = math.sin(d.theta)
    return np.array([st * math.cos(d.phi), st * math.sin(d.phi), math.cos(d.theta)])


def spin_projection(d: FieldDirection) -> np.ndarray:
    """Matrix of ``n . s``, the spin projection on the field direction."""
    n = direction_to_unit(d)
    return n[0] * _SX + n[1] * _SY + n[2] * _SZ


def inner_product(u: StateLike, v: StateLike) -> complex:
    """``<u|v>``, conjugate-linear in ``u``."""
    return complex(np.vdot(np.asarray(u, dtype=np.complex128), np.asarray(v, dtype=np.complex128)))


def fidelity(u: StateLike, v: StateLike) -> float:
    """Squared overlap ``|<u|v>|^2``, clipped to ``[0, 1]``."""
    f = abs(inner_product(u, v)) ** 2
    return min(max(f, 0.0), 1.0)


@dataclass(frozen=True)
class CanonicalState:
    """State with the global phase removed.

    ``moduli`` are ``(|a|, |b|, |c|)``; ``relative_phases`` are the phases
    of ``b`` and ``c`` measured from the reference component, in
    ``[0, 2 pi)``. The reference is ``a`` unless ``|a|`` falls below
    ``PHASE_FLOOR``, in which case it is the first component above it.
    """

    moduli: Tuple[float, float, float]
    relative_phases: Tuple[float, float]
    reference_index: int = field(default=0, compare=False)

    def to_state(self) -> StateVector:
        """Rebuild the state with the reference component real and positive."""
        a, b, c = self.moduli
        alpha, alpha_p = self.relative_phases
        comps = np.array([a, b * np.exp(1j * alpha), c * np.exp(1j * alpha_p)])
        return StateVector(comps, normalize=True)


def _wrap_2pi(x: float) -> float:
    x = math.fmod(x, TWO_PI)
    if x < 0.0:
        x += TWO_PI
    # fmod of values a hair below 2 pi can round up
    return 0.0 if x >= TWO_PI else x


def canonicalize(v: StateLike) -> CanonicalState:
    """Split a state into moduli and phases relative to a reference component."""
    c = as_state(v).components
    mods = np.abs(c)
    ref = next((k for k in range(3) if mods[k] >= PHASE_FLOOR), 0)
    ref_phase = float(np.angle(c[ref]))
    phases = []
    for k in (1, 2):
        if mods[k] < PHASE_FLOOR or k == ref:
            phases.append(0.0)
        else:
            phases.append(_wrap_2pi(float(np.angle(c[k])) - ref_phase))
    return CanonicalState(
        moduli=(float(mods[0]), float(mods[1]), float(mods[2])),
        relative_phases=(phases[0], phases[1]),
        reference_index=ref,
    )
