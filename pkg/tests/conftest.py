import numpy as np
import pytest

# worked example: f(x) = x^2 sampled at five points with phi_3 pushed up
EX_X = np.array([0.0, 0.5, 1.0, 1.5, 2.0])
EX_PHI = np.array([0.0, 0.5, 2.5, 3.75, 4.0])
EX_Y = np.array([0.0, 37 / 40, 21 / 10, 131 / 40, 89 / 20])
EX_RHO = np.array([0.0, -17 / 40, 2 / 5, 19 / 40, -9 / 20])


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def random_abscissae(rng, n, low=-3.0, high=3.0):
    while True:
        x = np.sort(rng.uniform(low, high, n))
        if np.all(np.diff(x) > 0):
            return x


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if not REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for line in REPORT:
        terminalreporter.write_line(line)
