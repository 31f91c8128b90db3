import math

import numpy as np
import pytest

from mwbank.design import sa1_product_filter
from mwbank.msf import bauer_fixed_point
from mwbank.mwt import sa1

R3 = math.sqrt(3.0)
C = math.sqrt(2.0) / 4

# Reference SA1 coefficients written out by hand.
H0_REF = C * np.array([[2.0, 0.0], [R3, 1.0]])
H1_REF = C * np.array([[2.0, 0.0], [-R3, 1.0]])
G0_REF = C * np.array([[0.0, 2.0], [-1.0, R3]])
G1_REF = C * np.array([[0.0, -2.0], [1.0, R3]])
X_REF = np.array([[0.5, R3 / 4], [R3 / 4, 0.5]])


@pytest.fixture(scope="session")
def P():
    return sa1_product_filter()


@pytest.fixture(scope="session")
def system():
    return sa1()


@pytest.fixture(scope="session")
def converged(P):
    return bauer_fixed_point(P, record=2000)


# -- acceptance summary ----------------------------------------------------------
#
# Tests marked ``@pytest.mark.criterion(n)`` are collected here and reported as one
# PASS/FAIL line per criterion at the end of the run.

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or rep.failed:
        n = mark.args[0]
        ok = _CRITERIA.get(n, True) and rep.passed
        _CRITERIA[n] = ok


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if _CRITERIA[n] else 'FAIL'}")
