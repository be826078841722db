import pytest
from hypothesis import HealthCheck, settings

# exact rational-function arithmetic is slow per example; no deadlines
settings.register_profile("exact", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("exact")


def pytest_configure(config):
    config._hallpath_acceptance = {}


@pytest.fixture
def record_criterion(request):
    def record(number: int, title: str, ok: bool, detail: str) -> str:
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        request.config._hallpath_acceptance[number] = line
        print(line)
        return line
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_hallpath_acceptance", {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
