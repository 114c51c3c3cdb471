"""Shared pytest plumbing.

The acceptance suite registers one verdict line per criterion; replaying
them in the terminal summary keeps them visible even though passing tests
have their output captured.
"""

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.ensure_newline()
    terminalreporter.section("acceptance criteria", sep="-")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
