"""Shared oracles and fixtures.

The helpers here deliberately avoid the package: spin matrices are typed in
literally and matrix exponentials come from scipy, so tests compare the
library against arithmetic it does not share.
"""

import math

import numpy as np
import pytest
from scipy.linalg import expm

R2 = math.sqrt(2.0)

SX = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / R2
SY = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / R2
SZ = np.diag([1.0, 0.0, -1.0]).astype(complex)

KET_P = np.array([1, 0, 0], dtype=complex)
KET_0 = np.array([0, 1, 0], dtype=complex)
KET_M = np.array([0, 0, 1], dtype=complex)
KET_F2 = np.array([-1, 0, 1], dtype=complex) / R2


def n_dot_s(theta, phi):
    return (math.sin(theta) * math.cos(phi) * SX
            + math.sin(theta) * math.sin(phi) * SY
            + math.cos(theta) * SZ)


def oracle_u(theta, phi, omega_t):
    return expm(-1j * omega_t * n_dot_s(theta, phi))


def oracle_fid(u, v):
    return abs(np.vdot(u, v)) ** 2 / (np.vdot(u, u).real * np.vdot(v, v).real)


def random_state(rng):
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES = {}


def record(number, name, passed, detail):
    ACCEPTANCE_LINES[number] = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d} {name}: {detail}"
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
