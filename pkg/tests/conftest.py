from __future__ import annotations

import random

import pytest

ACCEPTANCE_RESULTS: dict[str, str] = {}


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240613)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for mark in report.user_properties:
        if mark[0] == "criterion":
            ACCEPTANCE_RESULTS[mark[1]] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split(":")[0])):
        terminalreporter.write_line(f"[{ACCEPTANCE_RESULTS[key]}] criterion {key}")
