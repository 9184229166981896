from fractions import Fraction

import pytest

from bsregen.model import SystemParams


@pytest.fixture
def two_layer():
    """Four nodes, two lost together, two BS layers priced 1.1 and 1.7, a 4 MB file."""
    return SystemParams(4, 2, 2, 2, ("1.1", "1.7"), (1, 1), 4)


@pytest.fixture
def four_layer():
    """k=6, d=9, t=3 with four progressively dearer and thinner layers."""
    return SystemParams(12, 6, 9, 3, ("1.2", "1.4", "1.8", "1.84"), (1, "0.75", "0.5", "0.25"), 1)


def frac(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
