import numpy as np
import pytest

from szscatter.potentials import DEFAULT_UNITS, UnitsConfig

ALT_UNITS = UnitsConfig(hbar=0.7, mass=1.3)


@pytest.fixture(params=[DEFAULT_UNITS, ALT_UNITS], ids=["default", "alt"])
def units(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
