"""Acceptance reporting.

Tests marked ``@pytest.mark.criterion(n, "title")`` get one PASS/FAIL line
each in the terminal summary.  A test can add a short measurement to its
line through the ``detail`` fixture.
"""
import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.fixture
def detail(request):
    notes = []
    request.node.user_properties.append(("detail", notes))
    return notes.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and report.passed:
        return
    n, title = mark.args
    notes = [text for key, value in item.user_properties if key == "detail" for text in value]
    _RESULTS[n] = (title, "PASS" if report.passed else "FAIL", "; ".join(notes))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        title, status, notes = _RESULTS[n]
        line = f"criterion {n}: {status}  {title}"
        terminalreporter.write_line(line + (f"  ({notes})" if notes else ""))
