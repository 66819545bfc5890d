import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False,
                     help="run the long batch targets")


def run_slow(config) -> bool:
    return config.getoption("--run-slow") or os.environ.get("QMEMORY_RUN_SLOW") == "1"


def pytest_collection_modifyitems(config, items):
    if run_slow(config):
        return
    skip = pytest.mark.skip(reason="long batch target; use --run-slow or QMEMORY_RUN_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in mod.CRITERIA:
        runs = mod.VERDICTS.get(key)
        if not runs:
            tr.write_line(f"criterion {key}: NOT RUN  {mod.CRITERIA[key]} (slow tier or deselected)")
            continue
        for status, label, notes in runs:
            tail = f"  ({'; '.join(notes)})" if notes else ""
            tr.write_line(f"criterion {status}  {label}{tail}")
