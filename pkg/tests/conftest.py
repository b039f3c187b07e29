import pytest

from nilrf.certify import pencil_of
from nilrf.constructions import heisenberg, heisenberg_gaussian, single_matrix_quotient


@pytest.fixture(scope="session")
def h3():
    return heisenberg()


@pytest.fixture(scope="session")
def h3i():
    return heisenberg_gaussian()


@pytest.fixture(scope="session")
def quotient():
    return single_matrix_quotient()


@pytest.fixture(scope="session")
def h3i_pencil(h3i):
    return pencil_of(h3i)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
