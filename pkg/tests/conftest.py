from __future__ import annotations

import pytest

from ellischub.theta import Checker

ACCEPTANCE: dict = {}


@pytest.fixture
def checker() -> Checker:
    return Checker(3, 3)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, secs, note = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {secs:6.1f}s  {note}")
