import sys

import pytest

from helpers import V


@pytest.fixture
def homog():
    return V("x", "y")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        ok, title, elapsed, _ = mod.RESULTS[number]
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({elapsed:.1f} s)")
