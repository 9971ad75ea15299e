"""Shared fixtures: the acceptance checklist reporter.

Acceptance tests record one line per criterion; the lines are replayed in a
dedicated terminal section after the run so the checklist is visible even
with output capture on.
"""

import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record a pass/fail line for one acceptance criterion."""

    def record(line: str) -> None:
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
