import pytest

_verdicts: list[str] = []


@pytest.fixture
def verdict_log():
    return _verdicts


def pytest_terminal_summary(terminalreporter):
    if _verdicts:
        terminalreporter.section("acceptance criteria")
        for line in _verdicts:
            terminalreporter.write_line(line)
