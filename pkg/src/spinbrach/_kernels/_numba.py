"""Compiled first-hitting kernels.

For a fixed direction the overlap with the target is
``A(u) = p0 - 2 sin^2(u/2) p2 - i sin(u) p1`` with ``u = omega * t`` and
``p_k = <f| (n.s)^k |i>``, so each scan point costs a handful of flops.
"""

import math

import numba as nb
import numpy as np

njit = nb.njit(cache=True, nogil=True)


@njit
def _infidelity(p0, p1, p2, u):
    h = math.sin(0.5 * u)
    a = p0 - 2.0 * h * h * p2 - 1j * math.sin(u) * p1
    return 1.0 - (a.real * a.real + a.imag * a.imag)


@njit
def _dinfidelity(p0, p1, p2, u):
    h = math.sin(0.5 * u)
    s = math.sin(u)
    a = p0 - 2.0 * h * h * p2 - 1j * s * p1
    da = -s * p2 - 1j * math.cos(u) * p1
    return -2.0 * (a.real * da.real + a.imag * da.imag)


@njit
def _refine(p0, p1, p2, lo, hi, ures):
    if _dinfidelity(p0, p1, p2, lo) >= 0.0:
        return lo
    if _dinfidelity(p0, p1, p2, hi) <= 0.0:
        return hi
    for _ in range(200):
        if hi - lo <= ures:
            break
        mid = 0.5 * (lo + hi)
        if _dinfidelity(p0, p1, p2, mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@njit
def hit_scan(p0, p1, p2, u, vers, sn, tol, ures):
    """Return ``(u_hit, best_infidelity)``; ``u_hit`` is -1 when nothing hits.

    ``vers`` and ``sn`` are ``2 sin^2(u/2)`` and ``sin(u)`` tabulated on ``u``.
    """
    n = u.shape[0]
    p0r, p0i = p0.real, p0.imag
    p1r, p1i = p1.real, p1.imag
    p2r, p2i = p2.real, p2.imag
    m = abs(p1) + abs(p2)
    step = u[1] - u[0]
    # max drop of a local minimum between scan points, from a bound on g''
    gate = tol + (m + m * m) * step * step

    g_prev = 1.0 - (p0r * p0r + p0i * p0i)
    if g_prev <= tol:
        return u[0], g_prev
    best = g_prev
    g_left = np.inf
    # single pass: decide whether sample k-1 is a gated local minimum once g[k] is known
    for k in range(1, n + 1):
        if k < n:
            re = p0r - vers[k] * p2r + sn[k] * p1i
            im = p0i - vers[k] * p2i - sn[k] * p1r
            g_k = 1.0 - (re * re + im * im)
            if g_k < best:
                best = g_k
        else:
            g_k = np.inf
        if g_prev <= gate and g_prev < g_left and g_prev <= g_k:
            j = k - 1
            lo = u[j - 1] if j > 0 else u[0]
            hi = u[j + 1] if j < n - 1 else u[n - 1]
            uc = _refine(p0, p1, p2, lo, hi, ures)
            gc = _infidelity(p0, p1, p2, uc)
            if gc < best:
                best = gc
            if gc <= tol:
                return uc, best
        g_left = g_prev
        g_prev = g_k
    return -1.0, best


@nb.njit(cache=True, nogil=True, parallel=True)
def hit_scan_batch(p0, p1, p2, u, tol, ures):
    n = p0.shape[0]
    h = np.sin(0.5 * u)
    vers = 2.0 * h * h
    sn = np.sin(u)
    hits = np.empty(n)
    best = np.empty(n)
    for j in nb.prange(n):
        hits[j], best[j] = hit_scan(p0[j], p1[j], p2[j], u, vers, sn, tol, ures)
    return hits, best
