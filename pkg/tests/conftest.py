import numpy as np
import pytest

from polytess import rng as rngmod


@pytest.fixture
def rng():
    return rngmod.stream(20240611, rngmod.TEST)


def four_sigma(count, mean):
    """Poisson-style 4 sigma check of an observed total against its expectation."""
    return abs(count - mean) <= 4.0 * np.sqrt(max(mean, 1e-300))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in mod.REPORT:
            terminalreporter.write_line(line)
