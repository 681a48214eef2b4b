from __future__ import annotations

import pytest

# criterion label -> set of phase results ("passed", "failed", "skipped")
_RESULTS: dict[str, set[str]] = {}


def criterion(label: str):
    """Tag an acceptance test so the run ends with one status line for it."""

    def mark(fn):
        fn.criterion = label
        return fn

    return mark


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    label = getattr(getattr(item, "function", None), "criterion", None)
    if label is None:
        return
    seen = _RESULTS.setdefault(label, set())
    if report.failed:
        seen.add("failed")
    elif report.when == "call":
        seen.add(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_RESULTS, key=lambda s: int(s.split()[0])):
        seen = _RESULTS[label]
        status = "FAIL" if "failed" in seen else "PASS" if seen == {"passed"} else "NOT RUN"
        terminalreporter.write_line(f"ACCEPTANCE {label}: {status}")
