import random

import pytest

from upkit.field import Field
from upkit.group import group


@pytest.fixture(scope="session")
def F5():
    return Field(5)


@pytest.fixture(scope="session")
def F7():
    return Field(7)


@pytest.fixture(scope="session")
def F25():
    return Field(5, 2)


@pytest.fixture(scope="session")
def G4(F5):
    return group(4, F5)


@pytest.fixture(scope="session")
def G4_25(F25):
    return group(4, F25)


@pytest.fixture
def rng():
    return random.Random(20240816)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get(
        "tests.test_acceptance")
    lines = getattr(mod, "CRITERION_LINES", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
