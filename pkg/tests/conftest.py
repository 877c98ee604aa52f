import pytest
from hypothesis import settings

import helpers

settings.register_profile("repro", derandomize=True, deadline=None, max_examples=100)
settings.load_profile("repro")


@pytest.fixture
def diag4():
    return helpers.make_system("diag4")


@pytest.fixture
def uu1():
    return helpers.make_system("uu1")


def pytest_terminal_summary(terminalreporter):
    if not helpers.CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(helpers.CRITERIA):
        passed, detail = helpers.CRITERIA[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")
