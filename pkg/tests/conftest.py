import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")
    config.addinivalue_line("markers", "slow: takes more than a few seconds")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m:
            _ACCEPTANCE[item.nodeid] = {"number": m.args[0], "title": m.args[1], "outcome": "NOT RUN"}


def pytest_runtest_logreport(report):
    entry = _ACCEPTANCE.get(report.nodeid)
    if entry is None:
        return
    for key, value in report.user_properties:
        if key == "detail":
            entry["detail"] = value
    if report.failed:
        entry["outcome"] = "FAIL"
    elif report.when == "call" and report.passed:
        entry["outcome"] = "PASS"
    elif report.skipped:
        entry["outcome"] = "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for entry in sorted(_ACCEPTANCE.values(), key=lambda e: e["number"]):
        line = f"[{entry['outcome']}] {entry['number']}. {entry['title']}"
        if entry.get("detail"):
            line += f" -- {entry['detail']}"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240611)
