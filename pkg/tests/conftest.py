import numpy as np
import pytest

from hodgenerve.geometry import FlatTorus, PointRef, RoundSphere
from hodgenerve.nerve import Nerve
from hodgenerve.net import EpsilonNet, build_epsilon_net


def net_from(space, eps, coords):
    centers = tuple(PointRef(i, tuple(float(x) for x in c)) for i, c in enumerate(coords))
    return EpsilonNet(float(eps), centers, space, 0)


@pytest.fixture
def unit_torus():
    return FlatTorus((1.0, 1.0))


@pytest.fixture
def unit_sphere():
    return RoundSphere(1.0)


@pytest.fixture
def triangle():
    """The full 2-simplex on three vertices."""
    return Nerve.from_simplices([(0, 1, 2)])


@pytest.fixture
def three_cycle():
    return Nerve.from_simplices([(0, 1), (0, 2), (1, 2)])


@pytest.fixture(scope="session")
def torus_net_02():
    T = FlatTorus((1.0, 1.0))
    return T, build_epsilon_net(T, 0.2, 200)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
