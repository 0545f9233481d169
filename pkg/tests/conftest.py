"""Shared fixtures and the acceptance summary printed after the run."""

import pytest

ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def acceptance():
    """Record ``(criterion, passed, detail)``; printed once at the end of the session."""

    def record(key: str, passed: bool, detail: str) -> bool:
        ACCEPTANCE_LINES[key] = f"[{'PASS' if passed else 'FAIL'}] criterion {key}: {detail}"
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int(k.split(".")[0]), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
