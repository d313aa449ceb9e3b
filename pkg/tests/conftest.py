import pytest

_criteria: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number k")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    outcomes = _criteria.setdefault(crit, [])
    if report.when == "call" or report.outcome != "passed":
        outcomes.append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_criteria):
        results = _criteria[crit]
        ok = all(r == "passed" for r in results)
        passed = sum(r == "passed" for r in results)
        terminalreporter.write_line(f"criterion {crit:2d}: {'PASS' if ok else 'FAIL'} ({passed}/{len(results)} checks)")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240611)
