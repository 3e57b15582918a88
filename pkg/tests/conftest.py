import pytest

from pdcsqueeze import critical_coupling, reference_circuit, reference_drive

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    _criteria[number] = (title, report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, passed = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if passed else 'FAIL'}: {title}")


@pytest.fixture(scope="session")
def circuit():
    return reference_circuit()


@pytest.fixture(scope="session")
def drive():
    return reference_drive()


@pytest.fixture(scope="session")
def chi_c(drive):
    return critical_coupling(drive)
