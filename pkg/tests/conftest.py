"""Shared fixtures and the acceptance summary printed at the end of a run."""

import numpy as np
import pytest

from torickgk.gk_core import GKStructure
from torickgk.polytope import build_polytope
from torickgk.potential import Guillemin

POLYTOPE_DATA = {
    "interval": ([[1], [-1]], [0, 1]),
    "square": ([[1, 0], [0, 1], [-1, 0], [0, -1]], [0, 0, 1, 1]),
    "rectangle": ([[1, 0], [0, 1], [-1, 0], [0, -1]], [0, 0, 2, 3]),
    "simplex": ([[1, 0], [0, 1], [-1, -1]], [0, 0, 1]),
    "hirzebruch": ([[1, 0], [0, 1], [-1, -1], [0, -1]], [0, 0, 2, 1]),
    "cube": ([[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]], [0, 0, 0, 1, 1, 1]),
    "simplex3": ([[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]], [0, 0, 0, 1]),
}

#: Polytopes of dimension two used by the four dimensional checks.
SURFACES = ("square", "rectangle", "simplex", "hirzebruch")


def polytope(name):
    return build_polytope(*POLYTOPE_DATA[name])


def c_matrix(c):
    return np.array([[0.0, c], [-c, 0.0]])


def guillemin_structure(name, C=None):
    P = polytope(name)
    C = np.zeros((P.dim, P.dim)) if C is None else np.asarray(C, dtype=float)
    return GKStructure(P, Guillemin(P), C)


@pytest.fixture(scope="session")
def polytopes():
    return {k: polytope(k) for k in POLYTOPE_DATA}


@pytest.fixture
def rng():
    return np.random.default_rng(42)


# ------------------------------------------------------- acceptance summary

_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record ``(criterion, passed, detail)`` for the summary block."""

    def record(number, passed, detail):
        _ACCEPTANCE[number] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
