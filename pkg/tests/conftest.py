"""Collects the one-line verdicts of the acceptance suite and prints them at the end of the run."""
import pytest

_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record ``PASS/FAIL criterion k: detail`` and return whether it passed."""

    def record(number: int, passed: bool, detail: str) -> bool:
        line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}"
        _VERDICTS.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
