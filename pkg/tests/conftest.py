import numpy as np
import pytest

from ratstep import ProblemInstance, dense_operator


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def make_dense_problem(A, u0, source=None, exact=None):
    """Wrap a dense matrix and data as a ProblemInstance."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    zero = np.zeros(n)
    return ProblemInstance(
        name="dense",
        operator=dense_operator(A),
        grid=(np.arange(1, n + 1) / n,),
        u0=np.asarray(u0, dtype=float),
        source=source if source is not None else (lambda t: zero),
        exact=exact if exact is not None else (lambda t: zero),
    )


def random_dissipative(n, rng):
    S = rng.standard_normal((n, n))
    K = rng.standard_normal((n, n))
    return -(S @ S.T) / n + (K - K.T) / 2


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
