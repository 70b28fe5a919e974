import pytest

from msgames.instances import LO, RT3, RT4, two_color_structures


@pytest.fixture
def colors():
    return two_color_structures()


@pytest.fixture
def standard_structures():
    return [LO(2), LO(3), LO(4), RT3(), RT4()]


# lines recorded by the acceptance suite, echoed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[2])):
            terminalreporter.write_line(line)
