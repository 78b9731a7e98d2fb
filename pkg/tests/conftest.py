import os

import pytest


def pytest_collection_modifyitems(config, items):
    if os.environ.get("MLDEGEN_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="stretch benchmark; set MLDEGEN_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record a one-line verdict for an acceptance criterion."""
    def record(number, text):
        ACCEPTANCE[number] = text
    return record


def pytest_runtest_makereport(item, call):
    if call.when == "call" and item.get_closest_marker("criterion"):
        num = item.get_closest_marker("criterion").args[0]
        note = ACCEPTANCE.get(num, "")
        verdict = "FAIL" if call.excinfo else "PASS"
        ACCEPTANCE[num] = f"criterion {num:>2}: {verdict}  {note}"


def pytest_terminal_summary(terminalreporter):
    lines = [v for _, v in sorted(ACCEPTANCE.items()) if v.startswith("criterion")]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
