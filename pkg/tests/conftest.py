"""Shared fixtures: reduced grids, a normalized type-0 JSA and the beamsplitter bins"""

import numpy as np
import pytest

from bogoliubov.transforms import pdc_kernels
from processes.jsa import build_type0_jsa
from processes.normalization import normalize_jsa
from spectral.grid import make_grid
from spectral.modes import BinShape, ModeSet, gaussian_bin, symmetric_bins

GRID_N = 301


@pytest.fixture(scope="session")
def grid():
    return make_grid(0.0, 1.0, GRID_N)


@pytest.fixture(scope="session")
def out_grid():
    return make_grid(0.0, 2.0, GRID_N)


@pytest.fixture(scope="session")
def bins(grid):
    return symmetric_bins(grid, 0.5, 0.25, BinShape("gaussian", 0.1))


@pytest.fixture(scope="session")
def outputs(out_grid):
    modes = [gaussian_bin(out_grid, c, 0.1, label=f"O{m + 1}") for m, c in enumerate((0.5, 1.5))]
    return ModeSet.from_modes(modes, (0.5, 1.5))


@pytest.fixture(scope="session")
def jsa(grid):
    kernel, _ = normalize_jsa(build_type0_jsa(grid, 0.5, 0.05), 1.0)
    return kernel


@pytest.fixture(scope="session")
def pdc(jsa):
    return pdc_kernels(jsa)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
