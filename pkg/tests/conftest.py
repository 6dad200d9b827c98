import math

import numpy as np
import pytest

from worldfrac.hilbert import OrthogonalPartition, StateVector

SQRT3_2 = math.sqrt(3) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def spin_state():
    """sqrt(3)/2 |up> + 1/2 |down> over C."""
    return StateVector.from_complex([SQRT3_2, 0.5], ["up", "down"])


@pytest.fixture
def spin_partition():
    return OrthogonalPartition({"up": {"up"}, "down": {"down"}})


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
