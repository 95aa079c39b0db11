import pytest

from regrkit.datasets import load_traffic

CRITERION_TITLES = {
    1: "correlation matrix",
    2: "OLS over five attributes",
    3: "OLS over four attributes",
    4: "linear prediction table",
    5: "SVR, normalized",
    6: "SVR, standardized",
    7: "SVR, raw",
    8: "CFS selection",
    9: "training correlation coefficients",
    10: "growth report",
    11: "property suites",
}

_outcomes: dict[int, list[tuple[str, bool]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.fixture(scope="session")
def traffic():
    return load_traffic()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _outcomes.setdefault(mark.args[0], []).append((item.name, rep.outcome == "passed"))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_outcomes):
        results = _outcomes[n]
        ok = all(p for _, p in results)
        failed = [name for name, p in results if not p]
        line = f"criterion {n:>2} {CRITERION_TITLES.get(n, '')}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += f"  (failing: {', '.join(failed)})"
        tr.write_line(line)
