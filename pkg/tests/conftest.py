import random

import pytest

from mvtsp.core import INF, MvtspInstance

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def inst_of(d, k, name=None):
    return MvtspInstance(tuple(tuple(r) for r in d), tuple(k), name)


@pytest.fixture
def I2():
    return inst_of([[INF, 2], [3, INF]], [1, 1], "I2")


@pytest.fixture
def I2L():
    return inst_of([[5, 2], [3, 4]], [2, 1], "I2L")


@pytest.fixture
def T3():
    return inst_of([[INF, 1, 1], [1, INF, 1], [1, 1, INF]], [1, 1, 1], "T3")


def random_instance(seed, n_max=4, k_max=3, cost_max=9, p_inf=0.2, n_min=1):
    rng = random.Random(seed)
    n = rng.randint(n_min, n_max)
    d = [[INF if rng.random() < p_inf else rng.randint(0, cost_max) for _ in range(n)]
         for _ in range(n)]
    k = [rng.randint(1, k_max) for _ in range(n)]
    return inst_of(d, k, f"rand-{seed}")
