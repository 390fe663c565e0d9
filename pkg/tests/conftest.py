import numpy as np
import pytest

from kernelspde.integral import IntegralKernelEvaluator
from kernelspde.kernels import MaternKernel

THETA = 26.5

_ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def matern():
    return MaternKernel(3, THETA)


@pytest.fixture(scope="session")
def evaluator(matern):
    return IntegralKernelEvaluator(matern)


@pytest.fixture(scope="session")
def acceptance_report():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
