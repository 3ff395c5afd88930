from __future__ import annotations

import warnings

import pytest
from hypothesis import HealthCheck, settings

from epsub.demos import ackermann_loop_system, loop_term
from epsub.syntax import FreeVariableWarning, parse, parse_formula

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(autouse=True)
def _quiet_free_variables():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FreeVariableWarning)
        yield


@pytest.fixture
def e():
    """``e(n)`` is the n-th term of the loop family."""
    return loop_term


@pytest.fixture
def loop_system():
    return ackermann_loop_system()


@pytest.fixture
def f():
    return parse_formula


@pytest.fixture
def t():
    return parse


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
