from pathlib import Path

import pytest

from knotlab.geometry import Polygon3
from knotlab.homfly import default_table

DATA = Path(__file__).parent / "data"


# an equilateral six-stick left-handed trefoil, frozen from sampler draw (6, 2829)
HEXAGON_TREFOIL = [
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [0.26543820008670005, 0.6785417909813168, 0.0],
    [0.4082040603409945, 0.20384806596964852, -0.8684951217942437],
    [0.20175081703985714, -0.047389077442262215, 0.07715648218084843],
    [0.3593857426439755, 0.9318211863179398, -0.050509055755041],
]


def trefoil_hexagon() -> Polygon3:
    return Polygon3.equilateral(HEXAGON_TREFOIL)


@pytest.fixture(scope="session")
def table():
    return default_table()


@pytest.fixture(scope="session")
def trefoil6():
    return trefoil_hexagon()


_REPORT = pytest.StashKey[list]()


@pytest.fixture
def report(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(_REPORT, [])

    def _report(name, ok, detail):
        line = "%s  %s: %s" % ("PASS" if ok else "FAIL", name, detail)
        lines.append(line)
        print(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_REPORT, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
