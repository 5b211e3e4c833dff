"""Shared fixtures and the acceptance summary printed at the end of a run."""

import random

import pytest

from ugkit.catalog import worked_example

SEED = 20240917


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture
def ex22():
    return worked_example()


@pytest.fixture
def criterion(request):
    """Attach ``(number, detail)`` to the test so the summary can print it."""

    def record(number: int, detail: str) -> None:
        request.node.user_properties.append(("criterion", (number, detail)))

    return record


_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for key, value in report.user_properties:
        if key == "criterion":
            number, detail = value
            _ACCEPTANCE[number] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {detail}")
