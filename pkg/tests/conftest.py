import numpy as np
import pytest

from corpus import ACCEPTANCE_LINES
from torusfm import presets


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def klein():
    return presets.klein()


@pytest.fixture
def klein_rep():
    from torusfm import UnitaryRep

    w = np.exp(2j * np.pi / 3)
    return UnitaryRep([np.diag([w, w.conjugate()])], [np.array([[0, 1], [1, 0]])])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
