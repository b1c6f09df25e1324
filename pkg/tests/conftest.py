import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

DATA = os.path.join(os.path.dirname(__file__), "data")


def random_system(rng, n, m=4, density=0.6, l_ext_max=0.6):
    """Random cross-holdings with column sums below one, portfolio and l_ext."""
    c = rng.uniform(0, 1, (n, n)) * (rng.uniform(size=(n, n)) < density)
    np.fill_diagonal(c, 0.0)
    colsum = c.sum(axis=0)
    target = rng.uniform(0.05, 0.35, n)
    c *= np.divide(target, colsum, out=np.zeros(n), where=colsum > 0)[None, :]
    l_ext = rng.uniform(0, l_ext_max, n)
    d = rng.uniform(0, 10, (n, m))
    return c, d, l_ext


def random_feasible_marginals(rng, n):
    """Marginals of a random strictly positive hollow matrix."""
    x = rng.gamma(0.8, 1.0, (n, n)) * rng.uniform(0.5, 50)
    np.fill_diagonal(x, 0.0)
    return x.sum(axis=1), x.sum(axis=0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def synthetic_banks():
    return os.path.join(DATA, "synthetic_banks.csv")


@pytest.fixture
def synthetic_scenario():
    return os.path.join(DATA, "synthetic_scenario.csv")


# one line per acceptance criterion, repeated at the end of the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
