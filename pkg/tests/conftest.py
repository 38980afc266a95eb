import mpmath
import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(autouse=True)
def _restore_precision():
    saved = mpmath.mp.dps
    yield
    mpmath.mp.dps = saved


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split()[0])):
            terminalreporter.write_line(line)
