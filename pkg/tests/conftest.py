"""Collects acceptance-criterion results and prints them as a summary
block after the test run (immune to output capturing)."""

CRITERION_LINES = []


def record_criterion(line):
    CRITERION_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if not CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in CRITERION_LINES:
        terminalreporter.write_line(line)
