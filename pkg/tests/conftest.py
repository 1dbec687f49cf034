import numpy as np
import pytest

from transmutation import potentials as P
from transmutation.grid import Grid, SampledFunction
from transmutation.kernel import build_kernel

POTENTIALS = {
    "zero": P.zero,
    "one": lambda g: P.constant(g, 1.0),
    "step": lambda g: P.step(g, 1.0, 0.0),
    "x2": lambda g: P.polynomial(g, [0.0, 0.0, 1.0]),
}

_KERNELS = {}
ACCEPTANCE_LINES = []


def potential(name, n, a=1.0):
    return POTENTIALS[name](Grid(a, n))


def kernel_for(name, n, a=1.0):
    key = (name, n, a)
    if key not in _KERNELS:
        _KERNELS[key] = build_kernel(potential(name, n, a))
    return _KERNELS[key]


def powers(grid, k):
    return SampledFunction(grid, grid.nodes.astype(complex) ** k)


def sup(f, g=None):
    v = f.values if g is None else f.values - (g.values if hasattr(g, "values") else g)
    return float(np.max(np.abs(v)))


@pytest.fixture(scope="session")
def grid1000():
    return Grid(1.0, 1000)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
