import pytest

from loopcurv.algebra import su2
from loopcurv.fields import LoopField
from loopcurv.trig import TrigPoly

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def L():
    return su2()


@pytest.fixture
def example(L):
    """X = sin(theta) e, Y = sin(theta) f."""
    X = LoopField.along(L, 0, TrigPoly(sin={1: 1}))
    Y = LoopField.along(L, 1, TrigPoly(sin={1: 1}))
    return X, Y


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
