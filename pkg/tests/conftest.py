import pytest

from inls.ground_state import shoot
from inls.model import CartesianGrid, make_params


@pytest.fixture(scope="session")
def params():
    return make_params(1, 0.5)


@pytest.fixture(scope="session")
def gs(params):
    return shoot(params)


@pytest.fixture(scope="session")
def grid():
    return CartesianGrid(1, 20.0, 1024)


@pytest.fixture(scope="session")
def small_grid():
    return CartesianGrid(1, 20.0, 256)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is not None and mod.SUMMARY:
        terminalreporter.section("acceptance criteria")
        for line in mod.SUMMARY:
            terminalreporter.write_line(line)
