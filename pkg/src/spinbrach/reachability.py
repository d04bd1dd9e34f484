"""Which states can be reached from ``(0, 0, 1)`` by a constant field.

Evolution from the ``m = -1`` state only produces targets whose moduli obey
``|b|^2 = 2|a|(1-|a|)`` and ``|c| = 1 - |a|``. Beyond the moduli, the
relative phases must match as well; ``classify_target`` finds explicit
field angles and a phase ``omega*t`` reproducing the target.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import CapabilityError, DomainError
from .spin_algebra import (
    SQRT2,
    CanonicalState,
    StateLike,
    StateVector,
    as_state,
    canonicalize,
    fidelity,
)
from .propagator import analytic_state_minus

MODULUS_TOL = 1e-12
THETA_GRID = 1024
THETA_RESOLUTION = 1e-12


@dataclass(frozen=True)
class ReachabilityReport:
    reachable: bool
    modulus_residuals: Tuple[float, float]
    phase_residual: Optional[float]
    witness: Optional[Tuple[float, float, float]]
    delta_omega: float = 2.0

    @property
    def witness_time(self) -> Optional[float]:
        """Evolution time of the witness, ``omega_t / omega``."""
        if self.witness is None:
            return None
        return self.witness[2] / (0.5 * self.delta_omega)

    def to_dict(self) -> dict:
        out = {
            "reachable": self.reachable,
            "modulus_residuals": list(self.modulus_residuals),
            "phase_residual": self.phase_residual,
            "witness": None,
        }
        if self.witness is not None:
            th, ph, wt = self.witness
            out["witness"] = {"theta": th, "phi": ph, "omega_t": wt, "t": self.witness_time,
                              "t_delta_omega": self.witness_time * self.delta_omega}
        return out


def modulus_conditions(target: CanonicalState) -> Tuple[float, float]:
    """Residuals ``(| |b|^2 - 2|a|(1-|a|) |, | |c|^2 - (1-|a|)^2 |)``."""
    a, b, c = target.moduli
    return abs(b * b - 2.0 * a * (1.0 - a)), abs(c * c - (1.0 - a) ** 2)


def phase_condition(target: StateLike) -> float:
    """``|arg(a c conj(b)^2)|``; zero for every state reachable from ``(0, 0, 1)``.

    Returns 0 when any component vanishes and the phase is undefined.
    """
    t = as_state(target).components
    k = t[0] * t[2] * np.conj(t[1]) ** 2
    if abs(k) < MODULUS_TOL ** 2:
        return 0.0
    return abs(cmath.phase(k))


def _model_components(theta: float, omega_t: float) -> Tuple[complex, complex, complex]:
    """Components of the evolved m=-1 state at ``phi = 0``.

    The azimuth enters only as ``exp(-2i phi)``, ``exp(-i phi)``, ``1`` on the
    three components.
    """
    st, ct = math.sin(theta), math.cos(theta)
    s2 = math.sin(0.5 * omega_t) ** 2
    sn = math.sin(omega_t)
    a = -st * st * s2
    b = SQRT2 * ct * st * s2 - 1j * st * sn / SQRT2
    c = 1.0 - (1.0 + ct * ct) * s2 + 1j * ct * sn
    return complex(a), b, c


def _omega_t_branches(a_mod: float, theta: float) -> List[float]:
    st = math.sin(theta)
    if st <= 0.0:
        return []
    ratio = math.sqrt(a_mod) / st
    if ratio > 1.0:
        if ratio > 1.0 + 1e-13:
            return []
        ratio = 1.0
    x = 2.0 * math.asin(ratio)
    return [x] if ratio == 1.0 else [x, 2.0 * math.pi - x]


def _phase_mismatch(t: np.ndarray, theta: float, omega_t: float) -> float:
    """Phase of ``K_target / K_model`` with the rephasing invariant ``K = a c conj(b)^2``."""
    a, b, c = _model_components(theta, omega_t)
    k_model = a * c * b.conjugate() ** 2
    k_target = t[0] * t[2] * np.conj(t[1]) ** 2
    if abs(k_model) == 0.0 or abs(k_target) == 0.0:
        return 0.0
    return cmath.phase(k_target * k_model.conjugate())


def _best_phi(t: np.ndarray, theta: float, omega_t: float) -> Tuple[float, float]:
    """Azimuth aligning the model's phases with ``t``; returns ``(phi, infidelity)``."""
    a, b, c = _model_components(theta, omega_t)
    cands = [0.0]
    if abs(t[0]) > MODULUS_TOL and abs(t[2]) > MODULUS_TOL and abs(a) > 0 and abs(c) > 0:
        # -2 phi = arg(t_a / t_c) - arg(a / c)
        two_phi = cmath.phase(a / c) - cmath.phase(t[0] / t[2])
        cands += [0.5 * two_phi, 0.5 * two_phi + math.pi]
    if abs(t[1]) > MODULUS_TOL and abs(t[2]) > MODULUS_TOL and abs(b) > 0 and abs(c) > 0:
        cands.append(cmath.phase(b / c) - cmath.phase(t[1] / t[2]))
    if abs(t[0]) > MODULUS_TOL and abs(t[1]) > MODULUS_TOL and abs(a) > 0 and abs(b) > 0:
        cands.append(cmath.phase(a / b) - cmath.phase(t[0] / t[1]))
    best = (0.0, 2.0)
    for phi in cands:
        phi = math.fmod(phi, 2.0 * math.pi)
        if phi < 0:
            phi += 2.0 * math.pi
        e = cmath.exp(-1j * phi)
        model = np.array([a * e * e, b * e, c])
        model /= np.linalg.norm(model)
        inf = 1.0 - fidelity(model, t)
        if inf < best[1]:
            best = (phi, inf)
    return best


def _bisect_root(f, lo: float, hi: float, f_lo: float) -> float:
    for _ in range(200):
        if hi - lo <= THETA_RESOLUTION:
            break
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _mismatch_on_grid(t: np.ndarray, a_mod: float, thetas: np.ndarray, branch: int):
    """Vectorized phase mismatch and ``omega_t`` over a theta grid for one branch."""
    st = np.sin(thetas)
    ct = np.cos(thetas)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.minimum(math.sqrt(a_mod) / st, 1.0)
    wt = 2.0 * np.arcsin(ratio)
    if branch:
        wt = 2.0 * math.pi - wt
    s2 = np.sin(0.5 * wt) ** 2
    sn = np.sin(wt)
    a = -st * st * s2
    b = SQRT2 * ct * st * s2 - 1j * st * sn / SQRT2
    c = 1.0 - (1.0 + ct * ct) * s2 + 1j * ct * sn
    k_target = t[0] * t[2] * np.conj(t[1]) ** 2
    k_model = a * c * np.conj(b) ** 2
    vals = np.angle(k_target * np.conj(k_model))
    return vals, wt


def _witness_search(t: np.ndarray, a_mod: float):
    """Scan theta over its feasible window and solve the phase invariant by bisection."""
    theta_lo = math.asin(min(math.sqrt(a_mod), 1.0))
    theta_hi = math.pi - theta_lo
    if theta_hi - theta_lo < 1e-15:
        thetas = np.array([0.5 * math.pi])
    else:
        thetas = np.linspace(theta_lo, theta_hi, THETA_GRID)
    best = (2.0, None)

    def consider(theta, wt):
        nonlocal best
        phi, inf = _best_phi(t, theta, wt)
        if inf < best[0]:
            best = (inf, (float(theta), float(phi), float(wt)))

    # The model invariant a c conj(b)^2 is real and positive for every theta,
    # so any admissible theta works once the phases match; the perpendicular
    # field is the fastest member of that family.
    for wt in _omega_t_branches(a_mod, 0.5 * math.pi):
        consider(0.5 * math.pi, wt)
    if best[0] < 1e-15:
        return best

    for branch in (0, 1):
        def branch_wt(theta):
            ws = _omega_t_branches(a_mod, theta)
            if not ws:
                return None
            return ws[min(branch, len(ws) - 1)]

        def mismatch(theta):
            wt = branch_wt(theta)
            return np.nan if wt is None else _phase_mismatch(t, theta, wt)

        vals, wts = _mismatch_on_grid(t, a_mod, thetas, branch)
        i = int(np.nanargmin(np.abs(vals)))
        consider(thetas[i], wts[i])
        f0, f1 = vals[:-1], vals[1:]
        # a sign change across the 2 pi wrap of the phase is not a root
        brackets = np.flatnonzero((np.signbit(f0) != np.signbit(f1)) & (np.abs(f0 - f1) < math.pi))
        for i in brackets:
            root = _bisect_root(mismatch, thetas[i], thetas[i + 1], f0[i])
            wt = branch_wt(root)
            if wt is not None:
                consider(root, wt)
        if best[0] < 1e-15:
            break
    return best


def classify_target(target: StateLike, delta_omega: float = 2.0, tol: float = 1e-9,
                    initial: Optional[StateLike] = None) -> ReachabilityReport:
    """Decide whether ``target`` is reachable from ``(0, 0, 1)``.

    Parameters
    ----------
    target : StateVector or array_like
        Normalized target state.
    delta_omega : float
        Level spacing; only used to convert the witness phase into a time.
    tol : float
        Infidelity below which a witness counts as reaching the target.
    initial : optional
        Must be the ``m = -1`` eigenstate (up to phase) if given.

    Returns
    -------
    ReachabilityReport
        ``witness`` is ``(theta, phi, omega_t)`` when one is found.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    if not delta_omega > 0:
        raise DomainError("delta_omega must be positive")
    if initial is not None and fidelity(initial, StateVector.basis(-1)) < 1.0 - 1e-12:
        raise CapabilityError("reachability is characterized only from the m=-1 eigenstate (0, 0, 1)")
    psi = as_state(target)
    canon = canonicalize(psi)
    r_b, r_c = modulus_conditions(canon)
    if max(r_b, r_c) > MODULUS_TOL:
        return ReachabilityReport(False, (r_b, r_c), None, None, delta_omega)

    a_mod = canon.moduli[0]
    t = psi.components
    if a_mod < MODULUS_TOL:
        witness = (0.5 * math.pi, 0.0, 0.0)
        inf = 1.0 - fidelity(StateVector.basis(-1), t)
    else:
        inf, witness = _witness_search(t, a_mod)
        if witness is not None:
            inf = 1.0 - fidelity(analytic_state_minus(*witness), t)
    if witness is None or inf >= tol:
        return ReachabilityReport(False, (r_b, r_c), float(inf), None, delta_omega)
    return ReachabilityReport(True, (r_b, r_c), float(max(inf, 0.0)), witness, delta_omega)
