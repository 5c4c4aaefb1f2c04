"""Shared test fixtures.

Acceptance criteria record one line each in ``ACCEPTANCE_LINES``; the lines
are repeated in the terminal summary so they survive output capturing.
"""

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
