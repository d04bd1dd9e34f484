#!/usr/bin/env python3
"""Timing of the first-hitting scan: numba kernels against the numpy fallback.

Runs the full (theta, phi) grid scan used by the optimizer on a few state
pairs and reports wall time per backend, the speedup, and whether both
backends returned the same hitting times.

    python benchmarks/bench_kernels.py --grid 181,360 --repeat 3
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from spinbrach import _kernels, analytic_state_minus
from spinbrach.brachistochrone import PHASE_RESOLUTION, SCAN_POINTS, _overlap_coefficients

PAIRS = {
    "m=-1 -> m=+1": ([0, 0, 1], [1, 0, 0]),
    "m=0 -> (-1,0,1)/sqrt2": ([0, 1, 0], [-1 / math.sqrt(2), 0, 1 / math.sqrt(2)]),
    "m=-1 -> generic": ([0, 0, 1], analytic_state_minus(1.1, 0.7, 1.9).components),
}


def _grid_coefficients(psi_i, psi_f, n_theta, n_phi):
    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = np.arange(n_phi) * (2.0 * math.pi / n_phi)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    a = np.asarray(psi_i, dtype=np.complex128)
    b = np.asarray(psi_f, dtype=np.complex128)
    return _overlap_coefficients(a, b, tt.ravel(), pp.ravel())


def _time(backend, coeffs, u, tol, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = _kernels.hit_scan_batch(*coeffs, u, tol, PHASE_RESOLUTION, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--grid", default="181,360", help="T,P grid (default 181,360)")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--tol", type=float, default=1e-9)
    args = parser.parse_args(argv)
    n_theta, n_phi = (int(x) for x in args.grid.split(","))
    u = np.linspace(0.0, 4.0 * math.pi, SCAN_POINTS)

    # warm-up compiles (or loads cached) numba kernels
    warm = _grid_coefficients([0, 0, 1], [1, 0, 0], 9, 8)
    _kernels.hit_scan_batch(*warm, u, args.tol, PHASE_RESOLUTION, backend="numba")

    print(f"grid {n_theta}x{n_phi} = {n_theta * n_phi} nodes, {SCAN_POINTS} scan points, best of {args.repeat}")
    print(f"{'pair':<24} {'numba [s]':>10} {'numpy [s]':>10} {'speedup':>8} {'max |dt|':>10}")
    for name, (psi_i, psi_f) in PAIRS.items():
        coeffs = _grid_coefficients(psi_i, psi_f, n_theta, n_phi)
        t_nb, (h_nb, _) = _time("numba", coeffs, u, args.tol, args.repeat)
        t_np, (h_np, _) = _time("numpy", coeffs, u, args.tol, args.repeat)
        same = np.array_equal(h_nb >= 0, h_np >= 0)
        both = (h_nb >= 0) & (h_np >= 0)
        dt = float(np.max(np.abs(h_nb[both] - h_np[both]))) if both.any() else 0.0
        flag = "" if same else "  (hit sets differ)"
        print(f"{name:<24} {t_nb:10.3f} {t_np:10.3f} {t_np / t_nb:8.1f} {dt:10.1e}{flag}")


if __name__ == "__main__":
    main()
