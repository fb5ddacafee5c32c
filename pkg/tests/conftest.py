"""Collects one verdict line per acceptance criterion and prints them after the run."""

import pytest

_VERDICTS: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(code): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    detail = dict(item.user_properties).get("detail", "")
    _VERDICTS[mark.args[0]] = ("PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for code in sorted(_VERDICTS, key=lambda c: int(c[1:])):
        verdict, detail = _VERDICTS[code]
        terminalreporter.write_line(f"{code} {verdict}  {detail}")
