import numpy as np
import pytest
from hypothesis import strategies as st

from mdm.quantum_core import PureQubit


@pytest.fixture
def rng():
    return np.random.default_rng(20061015)


@st.composite
def qubits(draw):
    p = draw(st.floats(0.0, 1.0))
    phase = draw(st.floats(0.0, 2 * np.pi))
    return PureQubit(np.sqrt(p), np.sqrt(1 - p) * np.exp(1j * phase))


thetas = st.floats(0.0, np.pi / 4)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
