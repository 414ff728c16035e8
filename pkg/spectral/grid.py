"""
Frequency Grid Module
Uniform discretization of angular-frequency windows and sampled spectral functions
"""

import logging
from dataclasses import dataclass

import numpy as np

from guardrails.exceptions import ConfigurationError, UsageError

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid of n_points samples from start to stop (both included)"""

    start: float
    stop: float
    n_points: int

    def __post_init__(self):
        if not isinstance(self.n_points, (int, np.integer)) or self.n_points < 2:
            raise ConfigurationError(f"grid needs at least 2 points, got {self.n_points}")
        if not np.isfinite(self.start) or not np.isfinite(self.stop) or self.stop <= self.start:
            raise ConfigurationError(
                f"grid bounds must satisfy start < stop, got [{self.start}, {self.stop}]"
            )

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.n_points - 1)

    @property
    def span(self) -> float:
        return self.stop - self.start

    @property
    def center(self) -> float:
        return 0.5 * (self.start + self.stop)

    @property
    def points(self) -> np.ndarray:
        return self.start + np.arange(self.n_points) * self.step

    def contains(self, omega: float, tolerance: float = 1e-12) -> bool:
        slack = tolerance * self.span
        return self.start - slack <= omega <= self.stop + slack

    def refined(self, factor: int = 2) -> "FrequencyGrid":
        """Same window with (n_points - 1) * factor intervals"""
        return FrequencyGrid(self.start, self.stop, (self.n_points - 1) * factor + 1)


def make_grid(start: float, stop: float, n_points: int) -> FrequencyGrid:
    """
    Build a uniform frequency grid

    Args:
        start: First sample (angular frequency)
        stop: Last sample
        n_points: Number of samples, at least 2

    Returns:
        FrequencyGrid with step (stop - start) / (n_points - 1)
    """
    return FrequencyGrid(float(start), float(stop), int(n_points))


@dataclass(frozen=True, eq=False)
class SpectralFunction:
    """Complex amplitude samples of a temporal mode on a grid"""

    grid: FrequencyGrid
    samples: np.ndarray
    label: str = ""
    normalized: bool = False

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex)
        if samples.shape != (self.grid.n_points,):
            raise UsageError(
                f"'{self.label}' has {samples.shape} samples, grid has {self.grid.n_points}"
            )
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if self.normalized:
            norm = float(np.real(np.vdot(samples, samples)) * self.grid.step)
            if abs(norm - 1.0) > NORMALIZATION_TOLERANCE:
                raise UsageError(f"'{self.label}' marked normalized but has norm {norm}")

    @property
    def vector(self) -> np.ndarray:
        """Discrete mode vector: samples times sqrt(step)"""
        return self.samples * np.sqrt(self.grid.step)

    def norm(self) -> float:
        return float(np.sqrt(np.real(inner_product(self, self))))

    def scaled(self, factor: complex, label: str = None) -> "SpectralFunction":
        return SpectralFunction(self.grid, self.samples * factor, label or self.label)

    def with_label(self, label: str) -> "SpectralFunction":
        return SpectralFunction(self.grid, self.samples, label, self.normalized)


def inner_product(f: SpectralFunction, g: SpectralFunction) -> complex:
    """Riemann inner product sum(conj(f) * g) * step on a shared grid"""
    if f.grid != g.grid:
        raise UsageError(f"inner product of '{f.label}' and '{g.label}' on different grids")
    return complex(np.sum(np.conj(f.samples) * g.samples) * f.grid.step)


def zero_function(grid: FrequencyGrid, label: str = "zero") -> SpectralFunction:
    return SpectralFunction(grid, np.zeros(grid.n_points, dtype=complex), label)


def constant_function(grid: FrequencyGrid, value: complex = 1.0, label: str = "constant") -> SpectralFunction:
    return SpectralFunction(grid, np.full(grid.n_points, value, dtype=complex), label)


def sample_function(function: SpectralFunction, omegas: np.ndarray) -> np.ndarray:
    """Linear interpolation of a spectral function at arbitrary frequencies (zero outside)"""
    x = function.grid.points
    real = np.interp(omegas, x, function.samples.real, left=0.0, right=0.0)
    imag = np.interp(omegas, x, function.samples.imag, left=0.0, right=0.0)
    return real + 1j * imag
