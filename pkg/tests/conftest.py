from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from intcomplexity.complexity import build_table  # noqa: E402
from oracle import ones_count_oracle  # noqa: E402

# Largest argument the suite reads straight from a table: 2(1094*3^6 + 1).
TABLE_LIMIT = 2 * 10**6

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def table():
    return build_table(TABLE_LIMIT)


@pytest.fixture(scope="session")
def small_table():
    return build_table(10**4)


@pytest.fixture(scope="session")
def oracle():
    return ones_count_oracle(200)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
