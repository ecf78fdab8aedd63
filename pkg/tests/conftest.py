import pytest

from prime_gate.primes import PrimeEngine

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def engine(tmp_path_factory):
    return PrimeEngine(cache_path=tmp_path_factory.mktemp("cache") / "base.pgate")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
