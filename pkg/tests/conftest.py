import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

ACCEPTANCE: dict = {}


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion."""
    def record(number: int, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        ACCEPTANCE[number] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
