import pytest

ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance_log(request):
    return request.config.stash[ACCEPTANCE_KEY]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = sorted(config.stash.get(ACCEPTANCE_KEY, []))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in lines:
        terminalreporter.write_line(line)
    passed = sum(line.startswith("[PASS]") for _, line in lines)
    terminalreporter.write_line(f"{passed}/{len(lines)} criteria pass")
