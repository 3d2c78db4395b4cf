import numpy as np
import pytest

from semilab import semigroup as sg


@pytest.fixture(scope="session")
def ex2():
    return sg.multiplication_semigroup()


@pytest.fixture(scope="session")
def ex3():
    return sg.translation_limit_semigroup()


@pytest.fixture(scope="session")
def ex4():
    return sg.example4_semigroup()


@pytest.fixture(scope="session")
def ex5():
    return sg.example5_semigroup()


@pytest.fixture(scope="session")
def jordan():
    return sg.jordan_semigroup()


def smooth_core(x):
    return np.exp(-x) * np.cos(3 * x)


def zero_core(x):
    return np.zeros(np.shape(x))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(verdicts):
        terminalreporter.write_line(verdicts[n])
