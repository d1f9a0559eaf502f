import pytest

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    key = f"{mark.args[0]}"
    title = mark.args[1]
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        status = "PASS" if rep.passed else "FAIL"
        prev = _ACCEPTANCE.get(key)
        if prev is None or prev[0] == "PASS":
            _ACCEPTANCE[key] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")

    def order(k):
        num = "".join(ch for ch in k if ch.isdigit())
        return int(num), k

    for key in sorted(_ACCEPTANCE, key=order):
        status, title = _ACCEPTANCE[key]
        terminalreporter.write_line(f"{status} criterion {key}: {title}")
