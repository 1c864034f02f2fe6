import numpy as np
import pytest

from entassist.qcore import Bipartition, PureState

SQ2 = 1 / np.sqrt(2)


def ket(*pairs, n):
    """State from ``(bitstring, amplitude)`` pairs, normalized."""
    amps = np.zeros(2 ** n, dtype=complex)
    for bits, a in pairs:
        amps[int(bits, 2)] += a
    return PureState(amps / np.linalg.norm(amps), n)


@pytest.fixture
def bell():
    return ket(("00", 1), ("11", 1), n=2)


@pytest.fixture
def ghz():
    return ket(("000", 1), ("111", 1), n=3)


@pytest.fixture
def w3():
    return ket(("100", 1), ("010", 1), ("001", 1), n=3)


def cut(left, n):
    return Bipartition.split(left, n)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
