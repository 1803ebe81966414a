import numpy as np
import pytest

from oscmax.geometry import BaseDomain
from oscmax.grid import GridFunction


def dyadic_grid(rng, dim, m, high=1024, signed=False):
    """Random grid whose values are multiples of 1/1024, so sums are exact."""
    domain = BaseDomain.unit(dim, m)
    lo = -high if signed else 0
    values = rng.integers(lo, high, domain.shape) / 1024.0
    return GridFunction(domain, values)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def subset_contents(domain, window, beta):
    """Brute-force content of every subset of the window's cells, keyed by bitmask."""
    from oscmax.content import CellSet, content_brute

    cells = [c for c in domain.cells() if window.contains_cell(c)]
    table = np.zeros(1 << len(cells))
    for bits in range(1, 1 << len(cells)):
        mask = np.zeros(domain.shape, dtype=bool)
        for i, c in enumerate(cells):
            if bits >> i & 1:
                mask[c] = True
        table[bits] = content_brute(CellSet(domain, mask), beta)
    return cells, table


def dense_oscillation(f, window, beta, p, step):
    """``(min F(c), argmin)`` over ``c`` on a grid of the given step spanning
    the window's values, with ``F(c) = H(W)**-1 ∫_W |f - c|**p dH`` evaluated
    from brute-force contents (no ``1/p`` root)."""
    cells, table = subset_contents(f.domain, window, beta)
    vals = np.array([f.values[c] for c in cells])
    cs = np.arange(vals.min(), vals.max() + step / 2, step)
    d = np.abs(vals[None, :] - cs[:, None]) ** p
    levels = np.sort(d, axis=1)
    weights = 1 << np.arange(len(cells))
    keys = ((d[:, None, :] >= levels[:, :, None]) * weights).sum(axis=2)
    steps = np.diff(levels, axis=1, prepend=0.0)
    totals = (steps * table[keys]).sum(axis=1) / table[-1]
    i = int(np.argmin(totals))
    return float(totals[i]), float(cs[i])


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(LINES):
            terminalreporter.write_line(LINES[num])
