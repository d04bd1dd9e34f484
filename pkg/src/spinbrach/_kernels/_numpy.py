"""Vectorized numpy twin of the compiled kernels in ``_numba``."""

import numpy as np

_CHUNK = 512


def _infidelity(p0, p1, p2, u):
    h = np.sin(0.5 * u)
    a = p0 - 2.0 * h * h * p2 - 1j * np.sin(u) * p1
    return 1.0 - (a.real * a.real + a.imag * a.imag)


def _dinfidelity(p0, p1, p2, u):
    h = np.sin(0.5 * u)
    s = np.sin(u)
    a = p0 - 2.0 * h * h * p2 - 1j * s * p1
    da = -s * p2 - 1j * np.cos(u) * p1
    return -2.0 * (a.real * da.real + a.imag * da.imag)


def _refine(p0, p1, p2, lo, hi, ures):
    lo = lo.copy()
    hi = hi.copy()
    at_lo = _dinfidelity(p0, p1, p2, lo) >= 0.0
    at_hi = ~at_lo & (_dinfidelity(p0, p1, p2, hi) <= 0.0)
    active = ~(at_lo | at_hi)
    for _ in range(200):
        active &= (hi - lo) > ures
        if not active.any():
            break
        idx = np.flatnonzero(active)
        mid = 0.5 * (lo[idx] + hi[idx])
        down = _dinfidelity(p0[idx], p1[idx], p2[idx], mid) < 0.0
        lo[idx[down]] = mid[down]
        hi[idx[~down]] = mid[~down]
    return np.where(at_lo, lo, np.where(at_hi, hi, 0.5 * (lo + hi)))


def _batch_chunk(p0, p1, p2, u, tol, ures):
    n_nodes = p0.shape[0]
    n = u.shape[0]
    vers = 2.0 * np.sin(0.5 * u) ** 2
    sn = np.sin(u)
    re = np.multiply.outer(-p2.real, vers)
    re += np.multiply.outer(p1.imag, sn)
    re += p0.real[:, None]
    im = np.multiply.outer(-p2.imag, vers)
    im -= np.multiply.outer(p1.real, sn)
    im += p0.imag[:, None]
    re *= re
    im *= im
    g = re
    g += im
    np.subtract(1.0, g, out=g)
    del im
    best = g.min(axis=1)
    hits = np.full(n_nodes, -1.0)
    at_zero = g[:, 0] <= tol
    hits[at_zero] = u[0]

    step = u[1] - u[0]
    m = np.abs(p1) + np.abs(p2)
    slack = (m + m * m) * step * step
    cand = g <= (tol + slack)[:, None]
    cand[:, 1:] &= g[:, 1:] < g[:, :-1]
    cand[:, :-1] &= g[:, :-1] <= g[:, 1:]
    cand[at_zero] = False
    rows, ks = np.nonzero(cand)
    if rows.size == 0:
        return hits, best
    lo = u[np.maximum(ks - 1, 0)]
    hi = u[np.minimum(ks + 1, n - 1)]
    q0, q1, q2 = p0[rows], p1[rows], p2[rows]
    uc = _refine(q0, q1, q2, lo, hi, ures)
    gc = _infidelity(q0, q1, q2, uc)

    # the compiled kernel stops at the first hit, so later minima never lower best
    ok = gc <= tol
    first_ok = np.full(n_nodes, np.iinfo(np.int64).max)
    np.minimum.at(first_ok, rows[ok], np.flatnonzero(ok))
    order = np.arange(rows.size)
    visible = order <= first_ok[rows]
    np.minimum.at(best, rows[visible], gc[visible])
    has = first_ok < rows.size
    hits[has] = uc[first_ok[has]]
    return hits, best


def hit_scan_batch(p0, p1, p2, u, tol, ures):
    p0 = np.asarray(p0, dtype=np.complex128)
    p1 = np.asarray(p1, dtype=np.complex128)
    p2 = np.asarray(p2, dtype=np.complex128)
    hits = np.empty(p0.shape[0])
    best = np.empty(p0.shape[0])
    for s in range(0, p0.shape[0], _CHUNK):
        sl = slice(s, s + _CHUNK)
        hits[sl], best[sl] = _batch_chunk(p0[sl], p1[sl], p2[sl], u, tol, ures)
    return hits, best


def hit_scan(p0, p1, p2, u, tol, ures):
    hits, best = _batch_chunk(np.array([p0], dtype=np.complex128),
                              np.array([p1], dtype=np.complex128),
                              np.array([p2], dtype=np.complex128), u, tol, ures)
    return float(hits[0]), float(best[0])
