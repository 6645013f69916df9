import numpy as np
import pytest

from wgnls.geometry import build_coefficients, circle, line
from wgnls.spectral import StripGrid


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def flat_coeffs(n1=32, n2=8, eps=0.1):
    grid = StripGrid(n1, n2)
    return build_coefficients(line(2 * np.pi), eps, grid)


def circle_coeffs(n1=64, n2=8, eps=0.1):
    grid = StripGrid(n1, n2)
    return build_coefficients(circle(), eps, grid)


# one line per acceptance criterion, repeated at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
