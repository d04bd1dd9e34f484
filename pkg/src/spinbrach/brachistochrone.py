"""Optimal passage times for spin 1 in a field of fixed magnitude.

The public frequency is the level spacing ``delta_omega`` (largest minus
smallest eigenvalue of ``H / hbar``); the precession frequency used in the
propagator is ``omega = delta_omega / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import _kernels
from .errors import DomainError, NoSolutionError, UnreachableBySearchError
from .propagator import evolve
from .spin_algebra import (
    SQRT2,
    TWO_PI,
    FieldDirection,
    StateLike,
    StateVector,
    as_state,
    fidelity,
    inner_product,
    spin_matrices,
)

SCAN_POINTS = 4096
#: time resolution of hitting-time refinement, in units of 1/omega
PHASE_RESOLUTION = 1e-12
REFINE_ITERATIONS = 64
#: nodes within this many time units of the optimum are reported as degenerate
DEGENERACY_WINDOW = 1e-6
_DOMAIN_SLACK = 1e-14


@dataclass
class SolveResult:
    """Optimal field direction and passage time for one state pair.

    ``hit_times`` holds the first hitting time at every grid node (NaN where
    the node never reaches the target) and is ``None`` for analytic solves.
    """

    theta_star: float
    phi_star: float
    t_star: float
    fidelity_achieved: float
    speed_limit: float
    method: str
    delta_omega: float
    near_optimal: List[Tuple[float, float, float]] = field(default_factory=list)
    hit_times: Optional[np.ndarray] = field(default=None, repr=False)
    thetas: Optional[np.ndarray] = field(default=None, repr=False)
    phis: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def direction(self) -> FieldDirection:
        return FieldDirection(self.theta_star, self.phi_star)

    @property
    def omega_t(self) -> float:
        return 0.5 * self.delta_omega * self.t_star

    def to_dict(self) -> dict:
        return {
            "theta_star": self.theta_star,
            "phi_star": self.phi_star,
            "t_star": self.t_star,
            "t_delta_omega": self.t_star * self.delta_omega,
            "omega_t": self.omega_t,
            "fidelity_achieved": self.fidelity_achieved,
            "speed_limit": self.speed_limit,
            "t_over_speed_limit": (self.t_star / self.speed_limit) if self.speed_limit > 0 else None,
            "method": self.method,
            "delta_omega": self.delta_omega,
            "near_optimal_count": len(self.near_optimal),
        }


@dataclass(frozen=True)
class AlignmentAngle:
    """Phase ``alpha`` with ``z = |z| exp(i (phi - alpha))``.

    ``degenerate`` marks arguments where ``z`` vanishes and the phase is
    undefined; ``value`` is then 0.
    """

    value: float
    theta: float
    omega_t: float
    degenerate: bool = False

    def __float__(self) -> float:
        return self.value


def _check_delta_omega(delta_omega: float) -> None:
    if not delta_omega > 0:
        raise DomainError("delta_omega must be positive")


def arrival_time_minus(a_mod: float, theta: float, delta_omega: float) -> float:
    """First time the evolution from ``(0, 0, 1)`` reaches ``|a| = a_mod``.

    Valid for ``sin(theta)**2 >= a_mod``; the boundary itself is included.
    """
    _check_delta_omega(delta_omega)
    if not 0.0 <= a_mod <= 1.0:
        raise DomainError(f"a_mod={a_mod!r} outside [0, 1]")
    if a_mod == 0.0:
        return 0.0
    st = abs(math.sin(theta))
    if st * st < a_mod * (1.0 - _DOMAIN_SLACK):
        raise NoSolutionError(f"sin(theta)^2={st * st!r} < |a|={a_mod!r}: target not reachable at this theta")
    ratio = min(math.sqrt(a_mod) / st, 1.0)
    return 4.0 / delta_omega * math.asin(ratio)


def minimal_time_minus(a_mod: float, delta_omega: float) -> float:
    """Arrival time with the field perpendicular to z, the fastest choice."""
    return arrival_time_minus(a_mod, 0.5 * math.pi, delta_omega)


def arrival_time_zero(theta: float, delta_omega: float) -> float:
    """Time for the evolution from ``(0, 1, 0)`` to reach ``gamma = 1/2``."""
    _check_delta_omega(delta_omega)
    st = abs(math.sin(theta))
    target = 1.0 / SQRT2
    if st < target * (1.0 - _DOMAIN_SLACK):
        raise NoSolutionError(f"sin(theta)={st!r} < 1/sqrt(2): gamma never reaches 1/2")
    ratio = min(1.0 / (SQRT2 * st), 1.0)
    return 4.0 / delta_omega * math.asin(ratio)


def alignment_alpha(theta: float, omega_t: float, degenerate_tol: float = 1e-12) -> AlignmentAngle:
    """Phase ``alpha`` with ``tan(alpha) = cos(wt/2) / (cos(theta) sin(wt/2))``.

    The quadrant is fixed by ``atan2(cos(wt/2), cos(theta) sin(wt/2))`` so that
    the modulus prefactor of ``z`` stays nonnegative on ``0 < wt < 2 pi``.
    """
    if not 0.0 < omega_t < TWO_PI:
        raise DomainError(f"omega_t={omega_t!r} outside (0, 2 pi): alignment phase undefined")
    num = math.cos(0.5 * omega_t)
    den = math.cos(theta) * math.sin(0.5 * omega_t)
    if abs(num) < degenerate_tol and abs(den) < degenerate_tol:
        return AlignmentAngle(0.0, theta, omega_t, degenerate=True)
    return AlignmentAngle(math.atan2(num, den), theta, omega_t)


def speed_limit_bound(psi_i: StateLike, psi_f: StateLike, delta_omega: float) -> float:
    """Unconstrained passage-time bound ``(2 / delta_omega) arccos |<i|f>|``."""
    _check_delta_omega(delta_omega)
    overlap = min(abs(inner_product(as_state(psi_i), as_state(psi_f))), 1.0)
    return 2.0 / delta_omega * math.acos(overlap)


def _wrap_phi(phi: float) -> float:
    return FieldDirection(0.0, phi).phi


def solve_example2(delta_omega: float, theta: float) -> SolveResult:
    """Analytic solution from ``(0, 1, 0)`` to ``(-1, 0, 1)/sqrt(2)`` at fixed theta."""
    t_star = arrival_time_zero(theta, delta_omega)
    omega = 0.5 * delta_omega
    alpha = alignment_alpha(theta, omega * t_star)
    phi_star = _wrap_phi(alpha.value)
    psi_i = StateVector.basis(0)
    psi_f = StateVector([-1.0 / SQRT2, 0.0, 1.0 / SQRT2])
    direction = FieldDirection(theta, phi_star)
    fid = fidelity(evolve(psi_i, direction, omega, t_star), psi_f)
    return SolveResult(
        theta_star=direction.theta,
        phi_star=direction.phi,
        t_star=t_star,
        fidelity_achieved=fid,
        speed_limit=speed_limit_bound(psi_i, psi_f, delta_omega),
        method="analytic",
        delta_omega=delta_omega,
    )


def _overlap_coefficients(psi_i: np.ndarray, psi_f: np.ndarray, thetas: np.ndarray, phis: np.ndarray):
    """``<f|(n.s)^k|i>`` for k = 0, 1, 2 at each (theta, phi) pair."""
    sx, sy, sz = spin_matrices()
    st = np.sin(thetas)
    n = np.stack([st * np.cos(phis), st * np.sin(phis), np.cos(thetas)], axis=-1)
    ns = n[:, 0, None, None] * sx + n[:, 1, None, None] * sy + n[:, 2, None, None] * sz
    v1 = ns @ psi_i
    v2 = np.einsum("nij,nj->ni", ns, v1)
    fc = psi_f.conj()
    p0 = np.full(thetas.shape, complex(fc @ psi_i))
    return p0, v1 @ fc, v2 @ fc


def _scan_grid(u_max: float) -> np.ndarray:
    return np.linspace(0.0, u_max, SCAN_POINTS)


def first_hitting_time(psi_i: StateLike, psi_f: StateLike, direction: FieldDirection, omega: float,
                       tol: float = 1e-9, t_max: Optional[float] = None) -> Optional[float]:
    """Earliest time the evolution touches ``psi_f`` to within infidelity ``tol``.

    The infidelity is scanned on 4096 uniform points over ``[0, t_max]``; each
    local minimum that could dip to ``tol`` is located by bisection on the
    sign of the analytic time derivative. Returns the earliest such minimizer
    (or 0 when ``psi_i`` already matches), or None.
    """
    if omega <= 0:
        raise DomainError("omega must be positive")
    if not 0.0 < tol < 1.0:
        raise DomainError("tol must lie in (0, 1)")
    if t_max is None:
        t_max = 4.0 * math.pi / omega
    if t_max <= 0:
        raise DomainError("t_max must be positive")
    a = as_state(psi_i).components
    b = as_state(psi_f).components
    p0, p1, p2 = _overlap_coefficients(a, b, np.array([direction.theta]), np.array([direction.phi]))
    u_hit, _ = _kernels.hit_scan(p0[0], p1[0], p2[0], _scan_grid(omega * t_max), tol, PHASE_RESOLUTION)
    return None if u_hit < 0 else u_hit / omega


def _hit_u(a, b, theta, phi, u, tol):
    p0, p1, p2 = _overlap_coefficients(a, b, np.array([theta]), np.array([phi]))
    return _kernels.hit_scan(p0[0], p1[0], p2[0], u, tol, PHASE_RESOLUTION)


def _min_infidelity(a, b, theta, phi, u) -> float:
    """Smallest infidelity over the scan window, refined at the best scan minimum."""
    from ._kernels._numpy import _infidelity, _refine

    p0, p1, p2 = _overlap_coefficients(a, b, np.array([theta]), np.array([phi]))
    g = _infidelity(p0[0], p1[0], p2[0], u)
    k = int(np.argmin(g))
    lo = np.array([u[max(k - 1, 0)]])
    hi = np.array([u[min(k + 1, u.size - 1)]])
    uc = _refine(p0, p1, p2, lo, hi, PHASE_RESOLUTION)
    return float(min(g[k], _infidelity(p0[0], p1[0], p2[0], uc[0])))


def _clamp_theta(theta: float) -> float:
    return min(max(theta, 0.0), math.pi)


def _coordinate_descent(objective, theta, phi, step_theta, step_phi, iterations, min_gain):
    """Shrinking-step compass search over (theta, phi); deterministic move order."""
    best = objective(theta, phi)
    for _ in range(iterations):
        moved = False
        for d_theta, d_phi in ((-step_theta, 0.0), (step_theta, 0.0), (0.0, -step_phi), (0.0, step_phi)):
            cand_theta = _clamp_theta(theta + d_theta)
            cand_phi = phi + d_phi
            val = objective(cand_theta, cand_phi)
            if val < best - min_gain:
                theta, phi, best = cand_theta, cand_phi, val
                moved = True
                break
        if not moved:
            step_theta *= 0.5
            step_phi *= 0.5
    return theta, phi, best


def optimize_field(psi_i: StateLike, psi_f: StateLike, delta_omega: float,
                   grid: Tuple[int, int] = (181, 360), tol: float = 1e-9) -> SolveResult:
    """Minimal-time field direction by grid search plus local refinement.

    Every node of the ``(theta, phi)`` grid is scanned for its first hitting
    time within two precession periods; the earliest node (ties broken toward
    lower theta index, then lower phi index) seeds a compass search on the
    hitting time. When no node hits, a compass search on the minimal
    infidelity is tried first; if that also fails to reach ``tol`` an
    :class:`UnreachableBySearchError` is raised.
    """
    _check_delta_omega(delta_omega)
    n_theta, n_phi = (int(x) for x in grid)
    if n_theta < 8 or n_phi < 8:
        raise DomainError("grid dimensions must be at least 8")
    if not tol > 0:
        raise DomainError("tol must be positive")
    a = as_state(psi_i).components
    b = as_state(psi_f).components
    omega = 0.5 * delta_omega
    u = _scan_grid(4.0 * math.pi)

    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = np.arange(n_phi) * (TWO_PI / n_phi)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    p0, p1, p2 = _overlap_coefficients(a, b, tt.ravel(), pp.ravel())
    u_hits, best_g = _kernels.hit_scan_batch(p0, p1, p2, u, tol, PHASE_RESOLUTION)
    hit = u_hits >= 0
    hit_times = np.where(hit, u_hits, np.nan).reshape(n_theta, n_phi) / omega
    d_theta = thetas[1] - thetas[0]
    d_phi = phis[1] - phis[0]

    def hit_objective(theta, phi):
        uh, _ = _hit_u(a, b, theta, phi, u, tol)
        return np.inf if uh < 0 else uh

    if hit.any():
        u_best = u_hits[hit].min()
        # first node (row-major) within roundoff of the earliest time
        k = int(np.flatnonzero(hit & (u_hits <= u_best + 1e-12))[0])
        theta0, phi0 = float(tt.ravel()[k]), float(pp.ravel()[k])
    else:
        k = int(np.argmin(best_g))
        theta0, phi0 = float(tt.ravel()[k]), float(pp.ravel()[k])
        theta0, phi0, g_min = _coordinate_descent(
            lambda th, ph: _min_infidelity(a, b, th, ph, u),
            theta0, phi0, d_theta, d_phi, REFINE_ITERATIONS, 0.0)
        if g_min > tol or not np.isfinite(hit_objective(theta0, phi0)):
            raise UnreachableBySearchError(
                f"no field direction reaches the target within t_max; best infidelity {g_min:.3e}",
                best_infidelity=float(min(g_min, best_g.min())))

    theta_s, phi_s, u_star = _coordinate_descent(
        hit_objective, theta0, phi0, d_theta, d_phi, REFINE_ITERATIONS, 1e-9)
    direction = FieldDirection(theta_s, phi_s)
    t_star = u_star / omega

    near = []
    if hit.any():
        t_best = min(t_star, float(np.nanmin(hit_times)))
        for i, j in zip(*np.nonzero(np.abs(hit_times - t_best) <= DEGENERACY_WINDOW)):
            near.append((float(thetas[i]), float(phis[j]), float(hit_times[i, j])))

    return SolveResult(
        theta_star=direction.theta,
        phi_star=direction.phi,
        t_star=t_star,
        fidelity_achieved=fidelity(evolve(psi_i, direction, omega, t_star), psi_f),
        speed_limit=speed_limit_bound(psi_i, psi_f, delta_omega),
        method="grid+refine",
        delta_omega=delta_omega,
        near_optimal=near,
        hit_times=hit_times,
        thetas=thetas,
        phis=phis,
    )
