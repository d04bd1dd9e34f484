"""Reproduction checks run by ``spinbrach verify``.

Every check is deterministic: random cases come from fixed-seed generators.
A check's tolerance is the tighter of its own stated tolerance and the
run's ``tolerance`` setting.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .brachistochrone import (
    arrival_time_minus,
    arrival_time_zero,
    alignment_alpha,
    first_hitting_time,
    minimal_time_minus,
    optimize_field,
    solve_example2,
    speed_limit_bound,
)
from .propagator import (
    analytic_state_minus,
    analytic_state_zero,
    closed_form_propagator,
    evolve_many,
    sample_trajectory,
    scalar_exp_identity,
    spectral_propagator,
    zero_state_span_form,
)
from .reachability import classify_target, modulus_conditions
from .spin_algebra import SQRT2, FieldDirection, StateVector, canonicalize
from .subspace import example2_profile, orthonormal_span, trajectory_residual_profile

SEED = 20061


@dataclass
class RunConfig:
    delta_omega: float = 2.0
    tolerance: float = 1e-9
    samples: int = 1001
    grid: Tuple[int, int] = (181, 360)
    output_format: str = "json"

    def __post_init__(self):
        if not self.delta_omega > 0:
            raise ValueError("delta_omega must be positive")
        if not 0.0 < self.tolerance < 1.0:
            raise ValueError("tolerance must lie in (0, 1)")
        if self.samples < 2:
            raise ValueError("samples must be at least 2")
        if min(self.grid) < 8:
            raise ValueError("grid dimensions must be at least 8")
        if self.output_format not in ("json", "csv"):
            raise ValueError("format must be json or csv")

    @property
    def omega(self) -> float:
        return 0.5 * self.delta_omega


@dataclass
class CheckResult:
    """Outcome of one check; ``passed`` is None for informational entries."""

    name: str
    expected: str
    source: str
    measured: str
    tolerance: Optional[float]
    passed: Optional[bool]
    note: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        status = "INFO" if self.passed is None else ("PASS" if self.passed else "FAIL")
        tol = "-" if self.tolerance is None else f"{self.tolerance:.0e}"
        text = f"[{status}] {self.name}: expected {self.expected} ({self.source}); measured {self.measured}; tol {tol}"
        return text + (f"; {self.note}" if self.note else "")


def _tol(stated: float, cfg: RunConfig) -> float:
    return min(stated, cfg.tolerance)


def _rng(offset: int) -> np.random.Generator:
    return np.random.default_rng(SEED + offset)


def _random_direction(rng) -> FieldDirection:
    return FieldDirection(math.acos(rng.uniform(-1.0, 1.0)), rng.uniform(0.0, 2.0 * math.pi))


def _psi_minus() -> StateVector:
    return StateVector.basis(-1)


def _psi_f2() -> StateVector:
    return StateVector([-1.0 / SQRT2, 0.0, 1.0 / SQRT2])


def check_oracle(cfg: RunConfig) -> List[CheckResult]:
    rng = _rng(1)
    diff = unit = 0.0
    for _ in range(1000):
        d = _random_direction(rng)
        wt = rng.uniform(0.0, 4.0 * math.pi)
        u1 = closed_form_propagator(d, wt)
        u2 = spectral_propagator(d, wt)
        diff = max(diff, float(np.max(np.abs(u1.matrix - u2.matrix))))
        unit = max(unit, u1.unitarity_error(), u2.unitarity_error())
    tol = _tol(1e-12, cfg)
    return [
        CheckResult("propagator_oracle_equivalence", "max |closed - spectral| < tol", "derived",
                    f"{diff:.3e}", tol, diff < tol, "1000 random directions, omega*t in [0, 4 pi]"),
        CheckResult("propagator_unitarity", "max |U^dag U - I| < tol", "derived", f"{unit:.3e}", tol, unit < tol),
    ]


def check_scalar_identity(cfg: RunConfig) -> List[CheckResult]:
    rng = _rng(2)
    worst = 0.0
    for _ in range(100):
        x = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        for lam in (-1, 0, 1):
            ref = complex(np.exp(lam * x))
            worst = max(worst, abs(scalar_exp_identity(lam, x) - ref))
    tol = _tol(1e-13, cfg)
    return [CheckResult("scalar_exponential_identity", "exp(lam x) for lam in {-1,0,1}", "published",
                        f"{worst:.3e}", tol, worst < tol, "100 random complex x")]


def check_example1(cfg: RunConfig) -> Tuple[List[CheckResult], object]:
    dw = cfg.delta_omega
    res = optimize_field(_psi_minus(), StateVector.basis(1), dw, cfg.grid, cfg.tolerance)
    hit_rows = np.unique(np.nonzero(~np.isnan(res.hit_times))[0])
    only_perp = bool(hit_rows.size > 0 and np.all(np.abs(res.thetas[hit_rows] - math.pi / 2) < 1e-12))
    t_exp = 2.0 * math.pi / dw
    rel = abs(res.t_star - t_exp) / t_exp
    tol_t = _tol(1e-6, cfg)
    ratio = res.t_star / res.speed_limit
    exact_ratio = minimal_time_minus(1.0, dw) / speed_limit_bound(_psi_minus(), StateVector.basis(1), dw)
    out = [
        CheckResult("example1_only_perpendicular_field", "hits only at theta = pi/2", "published",
                    "hit rows at theta = " + ", ".join(f"{res.thetas[i]:.6f}" for i in hit_rows),
                    None, only_perp, f"{int(np.sum(~np.isnan(res.hit_times)))} hitting nodes"),
        CheckResult("example1_passage_time", f"t* = 2 pi/delta_omega = {t_exp:.12g}", "published",
                    f"{res.t_star:.12g} (rel err {rel:.2e}; t*delta_omega = {res.t_star * dw:.12g})",
                    tol_t, rel <= tol_t),
        CheckResult("example1_twice_speed_limit", "t* / bound = 2", "published",
                    f"numeric {ratio:.12g}, closed form {exact_ratio!r}", tol_t,
                    abs(ratio - 2.0) / 2.0 <= tol_t and exact_ratio == 2.0),
    ]
    return out, res


def check_example1_span(cfg: RunConfig, res=None) -> List[CheckResult]:
    if res is None:
        res = optimize_field(_psi_minus(), StateVector.basis(1), cfg.delta_omega, cfg.grid, cfg.tolerance)
    traj = sample_trajectory(_psi_minus(), res.direction, cfg.omega, res.t_star, cfg.samples)
    prof = trajectory_residual_profile(traj, orthonormal_span(_psi_minus(), StateVector.basis(1)))
    err = abs(prof.max_residual - 1.0 / SQRT2)
    tol = _tol(1e-9, cfg)
    return [CheckResult("example1_span_departure", "max residual = 1/sqrt(2)", "derived",
                        f"{prof.max_residual:.12f} at omega*t = {prof.argmax_t * cfg.omega:.6f}",
                        tol, err < tol)]


def check_example2(cfg: RunConfig) -> List[CheckResult]:
    dw = cfg.delta_omega
    sol = solve_example2(dw, math.pi / 2)
    t_exp = math.pi / dw
    rel = abs(sol.t_star - t_exp) / t_exp
    alpha = alignment_alpha(math.pi / 2, cfg.omega * sol.t_star)
    bound = speed_limit_bound(StateVector.basis(0), _psi_f2(), dw)
    tol_t, tol_f, tol_b = _tol(1e-9, cfg), _tol(1e-10, cfg), _tol(1e-12, cfg)
    return [
        CheckResult("example2_passage_time", f"t* = pi/delta_omega = {t_exp:.12g}", "published",
                    f"{sol.t_star:.12g} (rel err {rel:.2e})", tol_t, rel <= tol_t),
        CheckResult("example2_alignment_fidelity", "fidelity >= 1 - tol with phi = alpha(t_f)", "published",
                    f"1 - F = {1.0 - sol.fidelity_achieved:.3e}, phi = {sol.phi_star:.12f}, alpha = {alpha.value:.12f}",
                    tol_f, 1.0 - sol.fidelity_achieved <= tol_f),
        CheckResult("example2_saturates_speed_limit", f"t* = bound = {bound:.12g}", "published",
                    f"|t* - bound| = {abs(sol.t_star - bound):.3e}", tol_b, abs(sol.t_star - bound) <= tol_b),
    ]


def _random_state(rng) -> StateVector:
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    return StateVector(v, normalize=True)


def check_reachability(cfg: RunConfig) -> List[CheckResult]:
    rng = _rng(6)
    law = 0.0
    for _ in range(500):
        th, ph, wt = rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi), rng.uniform(0, 4 * math.pi)
        law = max(law, *modulus_conditions(canonicalize(analytic_state_minus(th, ph, wt))))
    rejected = misclassified = 0
    while rejected < 500:
        s = _random_state(rng)
        if max(modulus_conditions(canonicalize(s))) <= 1e-3:
            continue
        rejected += 1
        if classify_target(s, cfg.delta_omega, cfg.tolerance).reachable:
            misclassified += 1
    tol = _tol(1e-12, cfg)
    return [
        CheckResult("reachability_modulus_law", "|b|^2 = 2|a|(1-|a|), |c|^2 = (1-|a|)^2", "published",
                    f"max residual {law:.3e}", tol, law < tol, "500 random evolved states"),
        CheckResult("reachability_soundness", "0 of 500 law-violating states reachable", "derived",
                    f"{misclassified} misclassified", None, misclassified == 0),
    ]


def check_hitting_times(cfg: RunConfig) -> List[CheckResult]:
    rng = _rng(7)
    dw, w = cfg.delta_omega, cfg.omega
    worst_minus = 0.0
    misses = 0
    for _ in range(100):
        a = rng.uniform(0.05, 0.95)
        lo = math.asin(math.sqrt(a))
        theta = rng.uniform(lo, math.pi - lo)
        phi = rng.uniform(0, 2 * math.pi)
        t_f = arrival_time_minus(a, theta, dw)
        target = analytic_state_minus(theta, phi, w * t_f)
        t_num = first_hitting_time(_psi_minus(), target, FieldDirection(theta, phi), w, cfg.tolerance)
        if t_num is None:
            misses += 1
            continue
        worst_minus = max(worst_minus, abs(t_num - t_f) / t_f)
    worst_zero = 0.0
    for theta in np.linspace(math.pi / 4, 3 * math.pi / 4, 20):
        t_f = arrival_time_zero(theta, dw)
        phi = alignment_alpha(theta, w * t_f).value
        t_num = first_hitting_time(StateVector.basis(0), _psi_f2(), FieldDirection(theta, phi), w, cfg.tolerance)
        if t_num is None:
            misses += 1
            continue
        worst_zero = max(worst_zero, abs(t_num - t_f) / t_f)
    tol = _tol(1e-9, cfg)
    return [
        CheckResult("hitting_time_vs_closed_form_minus", "numeric = (4/dw) arcsin(sqrt|a|/sin theta)", "published",
                    f"max rel err {worst_minus:.3e}", tol, worst_minus <= tol and misses == 0,
                    "100 random (|a|, theta)"),
        CheckResult("hitting_time_vs_closed_form_zero", "numeric = (4/dw) arcsin(1/(sqrt2 sin theta))", "published",
                    f"max rel err {worst_zero:.3e}", tol, worst_zero <= tol and misses == 0,
                    f"20 theta in [pi/4, 3pi/4]; {misses} misses"),
    ]


def check_optimizer(cfg: RunConfig) -> List[CheckResult]:
    dw = cfg.delta_omega
    step = math.pi / (cfg.grid[0] - 1)
    out = []
    for a in (0.25, 0.5, 1.0):
        wt = 2.0 * math.asin(math.sqrt(a))
        target = analytic_state_minus(math.pi / 2, 0.0, wt)
        res = optimize_field(_psi_minus(), target, dw, cfg.grid, cfg.tolerance)
        ok_theta = abs(res.theta_star - math.pi / 2) <= step
        ok_bound = res.t_star >= res.speed_limit - 1e-9
        out.append(CheckResult(
            f"optimizer_recovers_perpendicular_a={a:g}", "theta* = pi/2 within one grid step; t* >= bound",
            "published", f"theta* = {res.theta_star:.9f}, t* = {res.t_star:.12g}, "
            f"closed form {minimal_time_minus(a, dw):.12g}, bound {res.speed_limit:.12g}",
            step, ok_theta and ok_bound))
    return out


def check_example2_span(cfg: RunConfig) -> List[CheckResult]:
    dw = cfg.delta_omega
    on = example2_profile(math.pi / 2, dw, cfg.samples)
    off = example2_profile(2 * math.pi / 5, dw, cfg.samples)
    stays = on.max_residual < 1e-6
    claim = ("claim of span departure at the optimum NOT reproduced: the trajectory stays in the span"
             if stays else "claim of span departure at the optimum reproduced")
    theta, phi, wt = 1.0, 0.3, 1.2
    direct = analytic_state_zero(theta, phi, wt).components
    printed = np.max(np.abs(zero_state_span_form(theta, phi, wt, 1.0) - direct))
    flipped = np.max(np.abs(zero_state_span_form(theta, phi, wt, -1.0) - direct))
    return [
        CheckResult("example2_span_residual_at_optimum", "reported only", "informational",
                    f"max residual {on.max_residual:.3e} at theta = pi/2", None, None, claim),
        CheckResult("example2_span_departure_off_optimum", "max residual > 0.01 at theta = 2 pi/5", "derived",
                    f"{off.max_residual:.6f}", 0.01, off.max_residual > 0.01),
        CheckResult("example2_span_form_sign", "reported only", "informational",
                    f"printed form deviates by {printed:.3e}, with m=+1 sign flipped {flipped:.3e}",
                    None, None, "m=+1 entry of the span form needs a minus sign to match direct evolution"
                    if flipped < 1e-12 < printed else "span form matches as printed"),
    ]


def check_conservation(cfg: RunConfig) -> List[CheckResult]:
    rng = _rng(10)
    norm_err = group = period = 0.0
    for _ in range(200):
        d = _random_direction(rng)
        psi = _random_state(rng)
        wt_end = rng.uniform(0.1, 4.0 * math.pi)
        rows = evolve_many(psi, d, np.linspace(0.0, wt_end, cfg.samples))
        norm_err = max(norm_err, float(np.max(np.abs(np.linalg.norm(rows, axis=1) - 1.0))))
        w1, w2 = rng.uniform(0, 2 * math.pi, size=2)
        u12 = closed_form_propagator(d, w1).matrix @ closed_form_propagator(d, w2).matrix
        group = max(group, float(np.max(np.abs(u12 - closed_form_propagator(d, w1 + w2).matrix))))
        period = max(period, float(np.max(np.abs(closed_form_propagator(d, w1 + 2 * math.pi).matrix
                                                  - closed_form_propagator(d, w1).matrix))))
    tol = _tol(1e-12, cfg)
    return [
        CheckResult("trajectory_norm_conservation", "| ||psi(t)|| - 1 | < tol", "derived",
                    f"{norm_err:.3e}", tol, norm_err < tol, f"200 trajectories x {cfg.samples} samples"),
        CheckResult("propagator_group_law", "U(a) U(b) = U(a+b)", "derived", f"{group:.3e}", tol, group < tol),
        CheckResult("propagator_periodicity", "U(wt + 2 pi) = U(wt)", "derived", f"{period:.3e}", tol, period < tol),
    ]


def run_all(cfg: Optional[RunConfig] = None,
            progress: Optional[Callable[[CheckResult], None]] = None) -> List[CheckResult]:
    cfg = cfg or RunConfig()
    results: List[CheckResult] = []

    def emit(items):
        for item in items:
            results.append(item)
            if progress is not None:
                progress(item)

    emit(check_oracle(cfg))
    emit(check_scalar_identity(cfg))
    ex1, res1 = check_example1(cfg)
    emit(ex1)
    emit(check_example1_span(cfg, res1))
    emit(check_example2(cfg))
    emit(check_reachability(cfg))
    emit(check_hitting_times(cfg))
    emit(check_optimizer(cfg))
    emit(check_example2_span(cfg))
    emit(check_conservation(cfg))
    return results


def all_passed(results: List[CheckResult]) -> bool:
    return all(r.passed is not False for r in results)
