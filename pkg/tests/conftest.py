import numpy as np
import pytest

from epsweep import ham


@pytest.fixture
def rng():
    return np.random.default_rng(20260318)


def fig1ab_matrix(a, omega=0.05):
    levels = [ham.Level(1 - a / 2, -1.0), ham.Level(a, -1.2)]
    return ham.build_two_level(levels, ham.Coupling(omega))


def random_two_level(rng):
    re = rng.uniform(-2, 2, size=5)
    levels = [ham.Level(re[0], re[1]), ham.Level(re[2], re[3])]
    return ham.build_two_level(levels, ham.Coupling(complex(re[4], rng.uniform(-2, 2))))


def random_doorway(rng):
    v = rng.uniform(-2, 2, size=8)
    levels = [ham.Level(v[0], v[1]), ham.Level(v[2], v[3]), ham.Level(v[4], v[5])]
    return ham.build_three_level_doorway(levels, ham.Coupling(complex(v[6], v[7])))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
