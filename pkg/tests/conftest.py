from __future__ import annotations

import pytest
from hypothesis import settings

from boltzspect.eigenvalues import build_table
from boltzspect.initial_data import bigauss_coeffs, measure_coeffs
from boltzspect.solver import solve

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def table20():
    return build_table(20)


@pytest.fixture(scope="session")
def bigauss20():
    return bigauss_coeffs(20)


@pytest.fixture(scope="session")
def measure20():
    return measure_coeffs(20)


@pytest.fixture(scope="session")
def bigauss_series(bigauss20, table20):
    return solve(bigauss20, table20, N=20)


@pytest.fixture(scope="session")
def measure_series(measure20, table20):
    return solve(measure20, table20, N=20)
