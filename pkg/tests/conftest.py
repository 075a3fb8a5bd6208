import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=(HealthCheck.too_slow,))
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_acceptance = {}
_notes = {}


@pytest.fixture
def note(request):
    """Attach a measured value to the acceptance summary line of this test."""
    marker = request.node.get_closest_marker("acceptance")
    label = marker.args[0] if marker else request.node.nodeid
    return lambda text: _notes.setdefault(label, []).append(text)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    label = marker.args[0]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        prev = _acceptance.get(label, "PASS")
        _acceptance[label] = "PASS" if prev == "PASS" and report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_acceptance, key=lambda s: int(s.split()[0][1:])):
        notes = "; ".join(_notes.get(label, []))
        terminalreporter.write_line(f"[{_acceptance[label]}] {label}" + (f" -- {notes}" if notes else ""))
