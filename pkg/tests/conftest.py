import pytest
from hypothesis import HealthCheck, settings

from hsk.elliptic_core import lattice_invariants

settings.register_profile(
    "hsk",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("hsk")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def lat2():
    return lattice_invariants(2j)


@pytest.fixture(scope="session")
def lat_sq():
    return lattice_invariants(1j)


@pytest.fixture(scope="session")
def lat_skew():
    return lattice_invariants(0.3 + 1.1j)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
