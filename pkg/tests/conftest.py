import numpy as np
import pytest

from musynth.observables import spin_operators

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def spin_half():
    return spin_operators(1)


@pytest.fixture(scope="session")
def spin_one():
    return spin_operators(2)


@pytest.fixture(scope="session")
def up():
    return np.array([1.0, 0.0], dtype=complex)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
