import pytest

from frilab.randomness import SeedSpec

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def seed():
    return SeedSpec(20240611)


@pytest.fixture
def verdict():
    """Record one acceptance line, then fail the test if the criterion failed."""
    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
