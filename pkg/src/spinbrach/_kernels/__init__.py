"""Backend dispatch for the hot first-hitting kernels.

``SPINBRACH_BACKEND=numpy`` forces the pure-numpy path; otherwise numba is
used when importable. ``SPINBRACH_THREADS`` caps numba's thread pool
(0 or unset leaves numba's default).
"""

import os
import warnings

import numpy as np

from . import _numpy

try:
    from . import _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

BACKENDS = ("numba", "numpy")


def _default_backend() -> str:
    env = os.environ.get("SPINBRACH_BACKEND", "").strip().lower()
    if env in BACKENDS:
        return env if (env == "numpy" or _numba is not None) else "numpy"
    return "numba" if _numba is not None else "numpy"


_backend = _default_backend()


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> str:
    """Select a backend; returns the previous one."""
    global _backend
    name = name.lower()
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if name == "numba" and _numba is None:
        raise ValueError("numba is not installed")
    prev, _backend = _backend, name
    return prev


def _apply_thread_cap():
    raw = os.environ.get("SPINBRACH_THREADS", "").strip()
    if not raw or _numba is None:
        return
    try:
        n = int(raw)
    except ValueError:
        return
    if n > 0:
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def _module(backend):
    return _numba if (backend or _backend) == "numba" else _numpy


def hit_scan(p0, p1, p2, u, tol, ures, backend=None):
    """First touch of the target along one direction; see ``_numba.hit_scan``."""
    mod = _module(backend)
    if mod is _numba:
        h = np.sin(0.5 * u)
        u_hit, best = _numba.hit_scan(complex(p0), complex(p1), complex(p2), u, 2.0 * h * h, np.sin(u),
                                      float(tol), float(ures))
    else:
        u_hit, best = _numpy.hit_scan(p0, p1, p2, u, tol, ures)
    return float(u_hit), float(best)


def hit_scan_batch(p0, p1, p2, u, tol, ures, backend=None):
    mod = _module(backend)
    if mod is _numba:
        _apply_thread_cap()
        with warnings.catch_warnings():
            # numba probes an outdated TBB on some hosts and warns before falling back
            warnings.filterwarnings("ignore", message=".*TBB threading layer.*")
            return mod.hit_scan_batch(p0, p1, p2, u, float(tol), float(ures))
    return mod.hit_scan_batch(p0, p1, p2, u, float(tol), float(ures))
