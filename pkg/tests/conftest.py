import numpy as np
import pytest

from coulomb_edge.potential import GINIBRE, MIXED, QUARTIC

RADIAL_POTENTIALS = {"r^2": GINIBRE, "r^4": QUARTIC, "r^2+r^4": MIXED}


@pytest.fixture(params=sorted(RADIAL_POTENTIALS))
def radial_pot(request):
    return RADIAL_POTENTIALS[request.param]


@pytest.fixture
def erfc_oracle():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 40
    return lambda t: float(mpmath.erfc(t))


def rel_err(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return np.abs(a - b) / np.maximum(np.abs(b), 1e-300)


ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::test_criterion_" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        detail = ACCEPTANCE_LINES.get(name, "")
        status = "PASS" if report.passed else "FAIL"
        ACCEPTANCE_LINES[name] = f"{status}  {name}  {detail}".rstrip()


def pytest_terminal_summary(terminalreporter):
    lines = [v for v in ACCEPTANCE_LINES.values() if v.startswith(("PASS", "FAIL"))]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s.split()[1]):
            terminalreporter.write_line(line)
