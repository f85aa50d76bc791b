import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "fourext",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("fourext")


@pytest.fixture(scope="session")
def ext():
    """Default extended precision in bits."""
    return 332


_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(num, label, ok, detail):
        line = f"criterion {num:>2}  {'PASS' if ok else 'FAIL'}  {label}: {detail}"
        _VERDICTS.append((num, line))
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_VERDICTS):
            terminalreporter.write_line(line)
