"""Shared pytest plumbing.

The acceptance tests register one human-readable verdict line apiece; the
terminal-summary hook reprints them after the run so they show up even
without -s.
"""

from __future__ import annotations

import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_report():
    def record(line: str) -> None:
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance summary")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
