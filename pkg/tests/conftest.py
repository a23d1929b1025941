import pytest

from mosfa.molecule import MoleculeModel
from mosfa.units import derive_params, intensity_to_field, wavelength_to_omega

E_ION = 0.6045


@pytest.fixture(scope="session")
def omega800():
    return wavelength_to_omega(800.0)


@pytest.fixture(scope="session")
def laser_2e13(omega800):
    return derive_params(intensity_to_field(2e13), omega800)


@pytest.fixture(scope="session")
def h2_r3():
    return MoleculeModel(3.0, E_ION)


@pytest.fixture(scope="session")
def h2_eq():
    return MoleculeModel(1.4, E_ION)


def pytest_terminal_summary(terminalreporter):
    from tests import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acceptance_log.LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

