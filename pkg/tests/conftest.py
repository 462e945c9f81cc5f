import pytest

from selbergconst.kernel import hq_integral


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="also run the long nightly-scale checks")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running check, needs --runslow")
    config._criteria = []


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def criteria(pytestconfig):
    """Collects one verdict line per acceptance criterion for the terminal summary."""
    return pytestconfig._criteria


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_criteria", [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def integrals_1e8():
    """∫_1^{10^8} h_v(s) ds/s for v = 1, 2 (about three minutes together)."""
    return {v: hq_integral(10**8, v) for v in (1, 2)}
