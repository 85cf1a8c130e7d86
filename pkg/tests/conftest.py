"""Shared fixtures; collects acceptance verdicts for the terminal summary."""

import pytest

_VERDICTS = []


@pytest.fixture
def verdict():
    """Record a one-line pass/fail verdict, then assert it.

    Usage: verdict(number, description, ok, detail).  The line is echoed
    immediately and repeated in the terminal summary, so the acceptance
    outcome is visible even for passing tests.
    """

    def record(number, description, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] criterion {number}: {description}"
        if detail:
            line += f" ({detail})"
        _VERDICTS.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
