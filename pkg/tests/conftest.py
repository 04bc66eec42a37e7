import pytest

from flowshop_markov.instance import Schedule, table_i

from helpers import OPTIMAL, WORST

_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def table3():
    return table_i(3)


@pytest.fixture(scope="session")
def optimal():
    return Schedule(OPTIMAL)


@pytest.fixture(scope="session")
def worst():
    return Schedule(WORST)


@pytest.fixture(scope="session")
def acceptance_log(request):
    log = request.config.stash.setdefault(_ACCEPTANCE, [])
    return log


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
