import pytest
from hypothesis import HealthCheck, settings

from hetcache.presets import table3_params, table3_popularity

from helpers import ACCEPTANCE_LINES

settings.register_profile(
    "repo", deadline=None, max_examples=150, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def table3():
    return table3_params()


@pytest.fixture(scope="session")
def zipf():
    return table3_popularity()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
