import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "rankedsim" / "data" / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Call with (ok, detail); records one line and asserts ``ok``."""
    name = request.node.name.removeprefix("test_")

    def report(ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, detail

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
