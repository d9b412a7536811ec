import os
import sys

# so test modules can import the shared corpus helpers regardless of rootdir
sys.path.insert(0, os.path.dirname(__file__))

# one line per acceptance criterion, printed after the run (uncaptured)
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
