import os

import pytest

from uavasym.config import REDUCED_LAMBDA_BAR, SystemConfig

ACCEPTANCE_LINES: list[str] = []


def pytest_collection_modifyitems(config, items):
    if os.environ.get("UAVASYM_SLOW"):
        return
    skip = pytest.mark.skip(reason="full-density run; set UAVASYM_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def defaults():
    return SystemConfig()


@pytest.fixture
def reduced():
    return SystemConfig(lambda_bar=REDUCED_LAMBDA_BAR)
