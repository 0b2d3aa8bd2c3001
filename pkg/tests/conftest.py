import numpy as np
import pytest

from reversals.reversal import RegressionProblem

ACCEPTANCE_LINES = []


def normal_equations_fit(y, X):
    """Coefficients of y on [e X] from the normal equations; test oracle only."""
    y = np.asarray(y, float)
    A = np.column_stack([np.ones(len(y)), np.asarray(X, float).reshape(len(y), -1)])
    return np.linalg.solve(A.T @ A, A.T @ y)


def lstsq_slope(y, *cols):
    """Coefficient of the first column in an intercept-included fit, via LAPACK."""
    A = np.column_stack([np.ones(len(y)), *cols])
    return np.linalg.lstsq(A, y, rcond=None)[0][1]


def random_problem(rng, n_max=12, p_max=2, k_max=4, k_min=1):
    k = int(rng.integers(k_min, k_max + 1))
    p = int(rng.integers(0, p_max + 1))
    n = int(rng.integers(p + k + 3, max(n_max, p + k + 3) + 1))
    y = rng.standard_normal(n)
    x = rng.standard_normal(n)
    W = rng.standard_normal((n, p))
    U = rng.standard_normal((n, k))
    return RegressionProblem.from_arrays(y, x, W, U)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
