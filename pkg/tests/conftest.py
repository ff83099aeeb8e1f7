import math

import pytest

from bbspaces import gabor as gb
from bbspaces import signal as sg
from bbspaces import wilson as wl

RT2 = 1 / math.sqrt(2)


@pytest.fixture(scope="session")
def grid16():
    return sg.GridSpec(16, 2048)


@pytest.fixture(scope="session")
def grid32():
    return sg.GridSpec(32, 4096)


@pytest.fixture(scope="session")
def gauss_lattice(grid16):
    return gb.LatticeSpec.for_grid(grid16, RT2, RT2)


@pytest.fixture(scope="session")
def gauss_dual(grid16, gauss_lattice):
    psi = sg.gaussian(grid16)
    gamma, info = gb.canonical_dual(psi, gauss_lattice, tol=1e-10, return_info=True)
    return psi, gamma, info


@pytest.fixture(scope="session")
def corpus16(grid16):
    return sg.hermite_corpus(grid16, 9)


@pytest.fixture(scope="session")
def corpus32(grid32):
    return sg.hermite_corpus(grid32, 9)


@pytest.fixture(scope="session")
def wilson_window(grid32):
    return wl.build_wilson_window(grid32, return_info=True)


@pytest.fixture(scope="session")
def box_setup():
    g = sg.box_grid()
    return g, sg.box(g, 0.0, 1.0), gb.LatticeSpec(1.0, 1.0, 12, 31)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda l: int(l.split()[2])):
            terminalreporter.write_line(line)
