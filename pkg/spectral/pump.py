"""
Network Unitary and Pump Synthesis Module
Interferometer matrices and the programmed mQPG pump spectrum
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.stats import unitary_group

from guardrails.exceptions import ConfigurationError, UsageError, ValidationError
from spectral.grid import FrequencyGrid, SpectralFunction
from spectral.modes import BinShape

logger = logging.getLogger(__name__)

UNITARITY_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class NetworkUnitary:
    """N_out x N_in interferometer matrix U_ml; rows have unit norm"""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(np.atleast_2d(self.entries), dtype=complex)
        if entries.ndim != 2 or entries.size == 0:
            raise ValidationError(f"network matrix must be 2-D and non-empty, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ValidationError("network matrix has non-finite entries")
        row_norms = np.linalg.norm(entries, axis=1)
        if np.max(np.abs(row_norms - 1.0)) > UNITARITY_TOLERANCE:
            raise ValidationError(f"network rows must have unit norm, got {row_norms}")
        if entries.shape[0] == entries.shape[1]:
            deviation = np.max(np.abs(entries @ entries.conj().T - np.eye(entries.shape[0])))
            if deviation > UNITARITY_TOLERANCE:
                raise ValidationError(f"square network matrix is not unitary (deviation {deviation:.3e})")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n_out(self) -> int:
        return self.entries.shape[0]

    @property
    def n_in(self) -> int:
        return self.entries.shape[1]

    @property
    def is_square(self) -> bool:
        return self.n_out == self.n_in

    def row(self, m: int) -> np.ndarray:
        return self.entries[m]


def balanced_beamsplitter() -> NetworkUnitary:
    return NetworkUnitary(np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0))


def even_output() -> NetworkUnitary:
    """Single-output network addressing (A1 + A2)/sqrt(2)"""
    return NetworkUnitary(np.array([[1.0, 1.0]]) / np.sqrt(2.0))


def phase_pattern_row(n: int, pattern: str) -> NetworkUnitary:
    """
    Single-output network over n bins

    Args:
        n: Number of input bins
        pattern: 'equal' for (1,...,1)/sqrt(n), 'alternating' for (1,-1,1,...)/sqrt(n)
    """
    if n < 1:
        raise ConfigurationError(f"need at least one bin, got {n}")
    if pattern == "equal":
        row = np.ones(n)
    elif pattern == "alternating":
        row = (-1.0) ** np.arange(n)
    else:
        raise ConfigurationError(f"unknown phase pattern '{pattern}'")
    return NetworkUnitary(row[np.newaxis, :] / np.sqrt(n))


def random_unitary(n: int, seed: Optional[int] = None) -> NetworkUnitary:
    """Haar-random n x n unitary"""
    return NetworkUnitary(unitary_group.rvs(n, random_state=seed) if n > 1 else np.ones((1, 1)))


def pump_bin_centers(U: NetworkUnitary, in_centers: Sequence[float], out_centers: Sequence[float]) -> np.ndarray:
    """Pump frequency out_m - in_l addressing input l into output m"""
    in_centers = np.asarray(in_centers, dtype=float)
    out_centers = np.asarray(out_centers, dtype=float)
    if in_centers.size != U.n_in or out_centers.size != U.n_out:
        raise UsageError(
            f"{in_centers.size} input / {out_centers.size} output centers for a {U.n_out}x{U.n_in} network"
        )
    return out_centers[:, np.newaxis] - in_centers[np.newaxis, :]


def synthesize_pump(
    U: NetworkUnitary,
    in_centers: Sequence[float],
    out_centers: Sequence[float],
    bin_shape: BinShape,
    pump_grid: FrequencyGrid
) -> SpectralFunction:
    """
    Programmed pump P(w_P) = sum_m sum_l U_ml B(out_m - in_l - w_P)

    Overlapping pump bins add coherently. Bin shapes are symmetric, so
    B(c - w_P) is the bin centered at c on the pump axis.

    Args:
        U: Network matrix
        in_centers: Input bin centers, one per column of U
        out_centers: Output peak centers, one per row of U
        bin_shape: Shape of each pump bin
        pump_grid: Grid of the pump axis w_P

    Returns:
        Complex pump spectrum on pump_grid
    """
    centers = pump_bin_centers(U, in_centers, out_centers)
    outside = [c for c in centers.ravel() if not pump_grid.contains(c)]
    if outside:
        raise ConfigurationError(
            f"pump bin centers {outside} outside pump grid [{pump_grid.start}, {pump_grid.stop}]"
        )

    samples = np.zeros(pump_grid.n_points, dtype=complex)
    for m in range(U.n_out):
        for l in range(U.n_in):
            if U.entries[m, l] == 0:
                continue
            samples += U.entries[m, l] * bin_shape.build(pump_grid, centers[m, l]).samples

    logger.debug("synthesized pump with %d bins on %d points", centers.size, pump_grid.n_points)
    return SpectralFunction(pump_grid, samples, label="pump")
