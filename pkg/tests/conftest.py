from pathlib import Path

import pytest

from briberon.kb import PriceTable

FIXTURES = Path(__file__).parent / "fixtures"


def table(size, entries=None, default=9):
    """Price table with ``default`` off the diagonal and explicit overrides."""
    rows = [[0 if i == j else default for j in range(size)] for i in range(size)]
    for (i, j), v in (entries or {}).items():
        rows[i][j] = v
    return PriceTable(tuple(map(tuple, rows)))


@pytest.fixture
def fixtures_dir():
    return FIXTURES


# criterion verdicts collected by test_acceptance, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
