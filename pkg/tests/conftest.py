"""Shared pytest wiring.

The acceptance tests (test_acceptance.py) register one line per criterion;
the terminal-summary hook prints them after the run so the gate's verdict
is visible even when every test passes.
"""

import re

_CRITERION_RE = re.compile(r"test_criterion_(\d+)")

_labels: dict[int, str] = {}
_outcomes: dict[int, str] = {}
_details: dict[int, str] = {}


def set_detail(num: int, text: str) -> None:
    """Attach measured values to a criterion's summary line."""
    _details[num] = text


def pytest_collection_modifyitems(items):
    for item in items:
        m = _CRITERION_RE.search(item.name)
        if not m:
            continue
        num = int(m.group(1))
        doc = (getattr(item, "function", None) and item.function.__doc__) or ""
        first = doc.strip().splitlines()[0].rstrip(".") if doc.strip() else item.name
        _labels[num] = first


def pytest_runtest_logreport(report):
    m = _CRITERION_RE.search(report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    if report.failed:
        _outcomes[num] = "FAIL"
    elif report.when == "call" and report.passed and _outcomes.get(num) != "FAIL":
        _outcomes[num] = "PASS"
    elif report.skipped:
        _outcomes.setdefault(num, "SKIP")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_outcomes):
        line = f"{_outcomes[num]}  criterion {num}: {_labels.get(num, '?')}"
        if num in _details:
            line += f"  [{_details[num]}]"
        terminalreporter.line(line)
