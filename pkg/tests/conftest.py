import numpy as np
import pytest

from optf.assumptions import assumption_report
from optf.ingest import ReturnMatrix, normalize

# six periods, four systems; the last period is a simultaneous biggest loss
EXAMPLE1 = np.array(
    [
        [2.0, 1.0, -1.0, 1.0],
        [2.0, -0.5, 2.0, -1.0],
        [-0.5, 1.0, -1.0, 2.0],
        [1.0, 2.0, 2.0, -1.0],
        [-0.5, -0.5, 2.0, 1.0],
        [-1.0, -1.0, -1.0, -1.0],
    ]
)

# five periods, two systems, biggest losses 6/5 and 3/2
EXAMPLE2 = np.array([[-3, 3], [9, 12], [6, -3], [-6, 1.5], [3, -7.5]]) / 5

# EXAMPLE2 plus a third system whose optimal fraction is zero
EXAMPLE3 = np.column_stack([EXAMPLE2, [1.0, 1.0, 1.0, -1.0, -1.0]])

# normalized rows of EXAMPLE2
EXAMPLE2_NORMALIZED = np.array([[-0.5, 0.4], [1.5, 1.6], [1.0, -0.4], [-1.0, 0.2], [0.5, -1.0]])


@pytest.fixture
def ex1():
    return ReturnMatrix(EXAMPLE1)


@pytest.fixture
def ex2():
    return ReturnMatrix(EXAMPLE2)


@pytest.fixture
def ex3():
    return ReturnMatrix(EXAMPLE3)


@pytest.fixture
def duplicate():
    return ReturnMatrix(np.column_stack([EXAMPLE1[:, :2], EXAMPLE1[:, 1]]))


def random_admissible(rng, count, max_periods=12, max_systems=4):
    """Rejection-sample return matrices that pass every admissibility check."""
    out = []
    while len(out) < count:
        m = int(rng.integers(1, max_systems + 1))
        n = int(rng.integers(m + 1, max_periods + 1))
        T = ReturnMatrix(rng.uniform(-1.0, 2.0, size=(n, m)))
        if assumption_report(T).overall:
            out.append(T)
    return out


def interior_point(rng, R, shrink=0.99):
    """Uniformly scaled point strictly inside the admissible set along a random direction."""
    from optf.domain import boundary_scale

    u = rng.dirichlet(np.ones(R.n_systems))
    return u * boundary_scale(R, u) * rng.uniform(0.0, shrink)


@pytest.fixture(scope="session")
def admissible_matrices():
    return random_admissible(np.random.default_rng(20240601), 50)


@pytest.fixture(scope="session")
def admissible_normalized(admissible_matrices):
    return [normalize(T) for T in admissible_matrices]


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
