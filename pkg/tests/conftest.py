import pytest

from selfforce_lab.kernels import TestBody

# (criterion number, title, passed, detail) filled in by test_acceptance.py
ACCEPTANCE_RESULTS = []


@pytest.fixture
def unit_body():
    return TestBody(radius_R=1.0, charge_density_rho_c=1.0)


@pytest.fixture
def odd_body():
    return TestBody(radius_R=1.7, charge_density_rho_c=0.3)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:2d}. {title}: {detail}")
