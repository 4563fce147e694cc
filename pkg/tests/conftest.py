import pytest

from pvu.posit_core import PositConfig


@pytest.fixture(scope="session")
def p8():
    return PositConfig(8, 2)


@pytest.fixture(scope="session")
def p16():
    return PositConfig(16, 2)


@pytest.fixture(scope="session")
def p32():
    return PositConfig(32, 2)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Collect one pass/fail line per acceptance check."""
    def _record(name: str, ok: bool, detail: str = "") -> bool:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
