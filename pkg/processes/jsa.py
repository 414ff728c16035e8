"""
Joint Spectral Amplitude Module
Type-0 PDC kernels from a cross-section profile or from pump and phasematching
"""

import logging

import numpy as np

from guardrails.exceptions import ConfigurationError, ResolutionError
from processes.kernels import SINC_FWHM_FRACTION, KernelKind, PhasematchingModel, ProcessKernel
from spectral.grid import FrequencyGrid, SpectralFunction, sample_function

logger = logging.getLogger(__name__)

MIN_FWHM_SAMPLES = 3.0


def build_type0_jsa(grid: FrequencyGrid, omega0: float, fwhm_jsa: float, profile: str = "gaussian") -> ProcessKernel:
    """
    Anti-diagonal stripe f(w, w') = Phi((w + w' - 2 w0) / sqrt(2))

    The amplitude is uniform along the anti-diagonal inside the window and
    the cross-section width is measured perpendicular to it.

    Args:
        grid: Signal/idler grid
        omega0: Degeneracy point (half the pump frequency)
        fwhm_jsa: Cross-section intensity FWHM for either profile
        profile: 'gaussian' or 'sinc'

    Returns:
        Symmetric JSA kernel with unit peak
    """
    if fwhm_jsa <= MIN_FWHM_SAMPLES * grid.step:
        raise ResolutionError(
            f"JSA width {fwhm_jsa} not resolved by grid step {grid.step} (needs > {MIN_FWHM_SAMPLES} steps)"
        )
    if not (grid.start <= omega0 <= grid.stop):
        raise ConfigurationError(f"degeneracy point {omega0} outside grid sum-frequency range")
    # the sinc model is parameterized by its first-zero width
    width = fwhm_jsa / SINC_FWHM_FRACTION if profile == "sinc" else fwhm_jsa
    pm = PhasematchingModel(profile, width, "antidiagonal", (omega0,))
    values = pm.evaluate(grid, grid)
    logger.debug("type-0 JSA: %s profile, FWHM %.4g on %d points", profile, fwhm_jsa, grid.n_points)
    return ProcessKernel(grid, grid, values, KernelKind.JSA)


def build_jsa_from_pump_pm(pump: SpectralFunction, pm: PhasematchingModel, grid: FrequencyGrid) -> ProcessKernel:
    """
    f(w, w') = P(w + w') * Phi(w, w')

    The pump is linearly interpolated at the sum frequencies and the product
    is symmetrized with (K + K^T) / 2.
    """
    pump_grid = pump.grid
    low, high = 2.0 * grid.start, 2.0 * grid.stop
    if not (pump_grid.contains(low) and pump_grid.contains(high)):
        raise ConfigurationError(
            f"pump grid [{pump_grid.start}, {pump_grid.stop}] does not cover sum frequencies [{low}, {high}]"
        )
    sums = grid.points[:, np.newaxis] + grid.points[np.newaxis, :]
    sums = np.clip(sums, pump_grid.start, pump_grid.stop)
    values = sample_function(pump, sums) * pm.evaluate(grid, grid)
    values = 0.5 * (values + values.T)
    return ProcessKernel(grid, grid, values, KernelKind.JSA)


def cross_section_fwhm(jsa: ProcessKernel, omega0: float) -> float:
    """
    Intensity FWHM of the JSA across the anti-diagonal through (w0, w0)

    Samples the diagonal w = w' (which is perpendicular to the stripe) and
    converts the sample spacing to the perpendicular distance.
    """
    grid = jsa.grid_rows
    intensity = np.abs(np.diag(jsa.values)) ** 2
    # distance from the stripe center along the normal: sqrt(2) * (w - w0)
    normal = np.sqrt(2.0) * (grid.points - omega0)
    return half_maximum_width(normal, intensity)


def half_maximum_width(x: np.ndarray, y: np.ndarray) -> float:
    """Full width at half maximum of a single-peaked sampled curve, crossings linearly interpolated"""
    peak_index = int(np.argmax(y))
    half = 0.5 * y[peak_index]
    left = peak_index
    while left > 0 and y[left - 1] >= half:
        left -= 1
    right = peak_index
    while right < len(y) - 1 and y[right + 1] >= half:
        right += 1
    if left == 0 or right == len(y) - 1:
        return float(x[right] - x[left])

    def crossing(inner: int, outer: int) -> float:
        fraction = (y[inner] - half) / (y[inner] - y[outer])
        return x[inner] + fraction * (x[outer] - x[inner])

    return float(crossing(right, right + 1) - crossing(left, left - 1))
