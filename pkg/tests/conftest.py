import time

import pytest

from kiriutensil import TABLE1_BAND, TABLE1_GEOMETRY, TABLE1_MATERIAL, TABLE1_SPRING, BandSpec

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def table1():
    return TABLE1_GEOMETRY, TABLE1_SPRING, TABLE1_MATERIAL, TABLE1_BAND


@pytest.fixture(scope="session")
def no_band():
    return BandSpec.absent()


@pytest.fixture
def criterion(request):
    """Time an acceptance criterion and record a pass/fail line for the summary."""
    marker = request.node.get_closest_marker("criterion")
    number, title, budget = marker.args
    start = time.perf_counter()
    yield budget
    elapsed = time.perf_counter() - start
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    _ACCEPTANCE.append((number, title, ok, elapsed, budget))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, budget_s): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, elapsed, budget in sorted(_ACCEPTANCE):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(
            f"AC{number:<2d} {status}  {title}  ({elapsed:.2f}s / budget {budget:g}s)"
        )
