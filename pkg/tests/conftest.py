import sys

import pytest

from nonlocality import contextuality

AUDIT = {"models": 0, "problems": []}


def _audit(model, result):
    AUDIT["models"] += 1
    # the LP cross-check for Strong/Logical is costly; keep it to small scenarios
    probs = contextuality.check_hierarchy(model, result, lp_check=model.n <= 3)
    if probs:
        AUDIT["problems"].append((repr(model), result.label.value, probs))


@pytest.fixture(autouse=True)
def hierarchy_audit():
    """Every model classified during a test must satisfy the hierarchy invariants."""
    start = len(AUDIT["problems"])
    contextuality.add_observer(_audit)
    yield
    contextuality.remove_observer(_audit)
    new = AUDIT["problems"][start:]
    assert not new, f"hierarchy violations: {new[:3]}"


def pytest_terminal_summary(terminalreporter):
    terminalreporter.write_line(
        f"hierarchy audit: {AUDIT['models']} classified models checked, {len(AUDIT['problems'])} problems")
    acc = sys.modules.get("test_acceptance")
    if acc is not None and acc.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acc.report_lines():
            terminalreporter.write_line(line)


def pytest_collection_modifyitems(items):
    # acceptance runs last so its audit criterion covers every model classified before it
    items.sort(key=lambda it: it.module.__name__.endswith("test_acceptance"))
