"""
Process Kernel Module
Discretized two-argument kernels (JSA and TF) and the parametric phasematching model
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from guardrails.exceptions import ConfigurationError, UsageError, ValidationError
from spectral.grid import FrequencyGrid

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-10
FWHM_TO_SIGMA = 1.0 / (2.0 * np.sqrt(2.0 * np.log(2.0)))
# intensity FWHM of sinc^2(x / w) in units of the first-zero width w
SINC_FWHM_FRACTION = 0.8858929413


class KernelKind(str, Enum):
    JSA = "JSA"
    TF = "TF"


@dataclass(frozen=True, eq=False)
class ProcessKernel:
    """
    Kernel samples K[i, j] = K(rows[i], cols[j])

    A JSA lives on one grid and is symmetric. A TF has the input axis on the
    rows and the output axis on the columns; TFs built from separable modes
    keep the factors (rows of `factors[0]` on grid_rows, rows of `factors[1]`
    on grid_cols) next to the dense values, which stay authoritative.
    """

    grid_rows: FrequencyGrid
    grid_cols: FrequencyGrid
    values: np.ndarray
    kind: KernelKind
    factors: Optional[Tuple[np.ndarray, np.ndarray]] = field(default=None)

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        expected = (self.grid_rows.n_points, self.grid_cols.n_points)
        if values.shape != expected:
            raise UsageError(f"kernel shape {values.shape} does not match grids {expected}")
        if not np.all(np.isfinite(values)):
            raise ValidationError("kernel has non-finite entries")
        if self.kind == KernelKind.JSA:
            if self.grid_rows != self.grid_cols:
                raise ValidationError("a JSA must live on a single grid")
            scale = np.linalg.norm(values)
            asymmetry = np.linalg.norm(values - values.T)
            if asymmetry > SYMMETRY_TOLERANCE * scale:
                raise ValidationError(f"JSA not symmetric: relative asymmetry {asymmetry / scale:.3e}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def weight(self) -> float:
        """Quadrature weight sqrt(step_rows * step_cols) turning samples into an operator matrix"""
        return float(np.sqrt(self.grid_rows.step * self.grid_cols.step))

    def operator(self) -> np.ndarray:
        return self.values * self.weight

    def scaled(self, factor: float) -> "ProcessKernel":
        factors = None
        if self.factors is not None:
            factors = (self.factors[0] * factor, self.factors[1])
        return ProcessKernel(self.grid_rows, self.grid_cols, self.values * factor, self.kind, factors)

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def is_zero(self) -> bool:
        return not np.any(self.values)


@dataclass(frozen=True)
class PhasematchingModel:
    """
    Parametric phasematching function

    profile: 'gaussian' (width = intensity FWHM) or 'sinc' (width = distance
    from the main-lobe maximum to its first zero). orientation 'antidiagonal'
    is the PDC stripe Phi(w + w' - 2 w0), peak_centers = (w0,);
    'horizontal' is the group-velocity matched mQPG, Phi = sum_m O_m(w_out)
    with peak_centers the output centers. Profiles have unit peak.
    """

    profile: str
    width: float
    orientation: str
    peak_centers: Tuple[float, ...]

    def __post_init__(self):
        if self.profile not in ("gaussian", "sinc"):
            raise ConfigurationError(f"unknown phasematching profile '{self.profile}'")
        if self.orientation not in ("antidiagonal", "horizontal"):
            raise ConfigurationError(f"unknown phasematching orientation '{self.orientation}'")
        if not self.width > 0:
            raise ConfigurationError(f"phasematching width must be positive, got {self.width}")
        centers = tuple(float(c) for c in self.peak_centers)
        object.__setattr__(self, "peak_centers", centers)
        if not centers:
            raise ConfigurationError("phasematching model needs at least one center")
        if self.orientation == "antidiagonal" and len(centers) != 1:
            raise ConfigurationError("antidiagonal phasematching takes exactly one degeneracy point")
        gaps = np.diff(centers)
        if np.any(gaps <= self.width):
            raise ConfigurationError(
                f"phasematching peaks must increase and be separated by more than {self.width}"
            )

    def shape(self, detuning: np.ndarray) -> np.ndarray:
        """Unit-peak profile as a function of detuning from a peak"""
        if self.profile == "gaussian":
            sigma = self.width * FWHM_TO_SIGMA
            return np.exp(-(detuning ** 2) / (4.0 * sigma ** 2))
        return np.sinc(detuning / self.width)

    def evaluate(self, grid_rows: FrequencyGrid, grid_cols: FrequencyGrid) -> np.ndarray:
        """Phi on the product grid, rows x cols"""
        rows = grid_rows.points[:, np.newaxis]
        cols = grid_cols.points[np.newaxis, :]
        if self.orientation == "antidiagonal":
            omega0 = self.peak_centers[0]
            return self.shape((rows + cols - 2.0 * omega0) / np.sqrt(2.0)).astype(complex)
        peaks = sum(self.shape(grid_cols.points - c) for c in self.peak_centers)
        return np.broadcast_to(peaks[np.newaxis, :], (grid_rows.n_points, grid_cols.n_points)).astype(complex)
