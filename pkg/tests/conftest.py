import numpy as np
import pytest

from twotier.geometry import SystemParams

K_PRIME = 128 / 10 ** 0.7


def identical_users(params, size, rng):
    """Gain source where every user has unit gain to both bases."""
    return np.ones(size), np.ones(size)


@pytest.fixture
def params():
    return SystemParams()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
