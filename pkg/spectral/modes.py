"""
Mode Shapes Module
Frequency bins (Gaussian and box), bin placement and superposition modes
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from guardrails.exceptions import ConfigurationError, ResolutionError, UsageError, ValidationError
from spectral.grid import FrequencyGrid, SpectralFunction

logger = logging.getLogger(__name__)

FWHM_TO_SIGMA = 1.0 / (2.0 * np.sqrt(2.0 * np.log(2.0)))
ORTHONORMAL_TOLERANCE = 1e-6
MIN_FWHM_SAMPLES = 3.0
MIN_BOX_SAMPLES = 2.0


def gaussian_bin(grid: FrequencyGrid, center: float, fwhm: float, label: str = "") -> SpectralFunction:
    """
    Real Gaussian bin whose intensity |A|^2 has the given full width at half maximum

    Args:
        grid: Frequency grid
        center: Center frequency, must lie on the grid window
        fwhm: Intensity FWHM, must exceed three grid steps

    Returns:
        L2-normalized SpectralFunction
    """
    if not grid.contains(center):
        raise ConfigurationError(f"bin center {center} outside grid [{grid.start}, {grid.stop}]")
    if fwhm <= MIN_FWHM_SAMPLES * grid.step:
        raise ResolutionError(
            f"bin FWHM {fwhm} not resolved by grid step {grid.step} (needs > {MIN_FWHM_SAMPLES} steps)"
        )
    sigma = fwhm * FWHM_TO_SIGMA
    amplitude = np.exp(-((grid.points - center) ** 2) / (4.0 * sigma ** 2))
    norm = np.sqrt(np.sum(amplitude ** 2) * grid.step)
    return SpectralFunction(grid, amplitude / norm, label or f"gauss@{center:.6g}", normalized=True)


def box_bin(
    grid: FrequencyGrid,
    center: float,
    width: float,
    label: str = "",
    omega0: Optional[float] = None
) -> SpectralFunction:
    """
    Constant amplitude on [center - width/2, center + width/2]

    With omega0 given, the edge facing omega0 is open, so boxes that touch
    on either side of the degeneracy point never share a boundary sample and
    mirrored placements stay mirror-symmetric. A box centered on omega0 keeps
    both edges closed.
    """
    if width < MIN_BOX_SAMPLES * grid.step:
        raise ResolutionError(f"box width {width} below {MIN_BOX_SAMPLES} grid steps ({grid.step})")
    half = 0.5 * width
    if not (grid.contains(center - half) and grid.contains(center + half)):
        raise ConfigurationError(
            f"box [{center - half}, {center + half}] exceeds grid [{grid.start}, {grid.stop}]"
        )
    tol = 1e-9 * grid.step
    offset = grid.points - center
    low_open = omega0 is not None and omega0 < center - tol
    high_open = omega0 is not None and omega0 > center + tol
    above_low = offset > -half + tol if low_open else offset >= -half - tol
    below_high = offset < half - tol if high_open else offset <= half + tol
    inside = above_low & below_high
    count = int(np.count_nonzero(inside))
    if count == 0:
        raise ResolutionError(f"box at {center} of width {width} contains no grid samples")
    amplitude = np.where(inside, 1.0 / np.sqrt(count * grid.step), 0.0)
    return SpectralFunction(grid, amplitude, label or f"box@{center:.6g}", normalized=True)


@dataclass(frozen=True)
class BinShape:
    """Bin profile and width shared by all bins of one experiment"""

    kind: str
    width: float

    def __post_init__(self):
        if self.kind not in ("gaussian", "box"):
            raise ConfigurationError(f"unknown bin shape '{self.kind}'")
        if not self.width > 0:
            raise ConfigurationError(f"bin width must be positive, got {self.width}")

    def build(
        self, grid: FrequencyGrid, center: float, label: str = "", omega0: Optional[float] = None
    ) -> SpectralFunction:
        """Bin at center; omega0 only matters for boxes (see box_bin)"""
        if self.kind == "gaussian":
            return gaussian_bin(grid, center, self.width, label)
        return box_bin(grid, center, self.width, label, omega0)


@dataclass(frozen=True, eq=False)
class ModeSet:
    """Ordered modes on one grid together with their center frequencies"""

    modes: Tuple[SpectralFunction, ...]
    centers: Tuple[float, ...]
    orthonormal: bool = False
    feasible: bool = True
    spacing: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "centers", tuple(float(c) for c in self.centers))
        if self.feasible and len(self.modes) != len(self.centers):
            raise UsageError(f"{len(self.modes)} modes but {len(self.centers)} centers")
        grids = {mode.grid for mode in self.modes}
        if len(grids) > 1:
            raise UsageError("all modes of a ModeSet must share one grid")
        if self.orthonormal and self.gram_deviation() > ORTHONORMAL_TOLERANCE:
            raise ValidationError(
                f"modes marked orthonormal deviate from identity by {self.gram_deviation():.3e}"
            )

    @classmethod
    def from_modes(cls, modes: Sequence[SpectralFunction], centers: Sequence[float]) -> "ModeSet":
        """Build a set and mark it orthonormal when the Gram matrix allows it"""
        candidate = cls(tuple(modes), tuple(centers))
        orthonormal = candidate.gram_deviation() <= ORTHONORMAL_TOLERANCE
        return cls(tuple(modes), tuple(centers), orthonormal=orthonormal)

    @classmethod
    def infeasible(cls, centers: Sequence[float], spacing: Optional[float]) -> "ModeSet":
        return cls((), tuple(centers), feasible=False, spacing=spacing)

    def __len__(self) -> int:
        return len(self.modes)

    @property
    def grid(self) -> FrequencyGrid:
        if not self.modes:
            raise UsageError("empty ModeSet has no grid")
        return self.modes[0].grid

    def sample_matrix(self) -> np.ndarray:
        """Samples stacked row-wise: shape (n_modes, n_points)"""
        return np.vstack([mode.samples for mode in self.modes])

    def vectors(self) -> np.ndarray:
        """Discrete mode vectors stacked row-wise"""
        return self.sample_matrix() * np.sqrt(self.grid.step)

    def gram(self) -> np.ndarray:
        if not self.modes:
            return np.zeros((0, 0), dtype=complex)
        vectors = self.vectors()
        return np.conj(vectors) @ vectors.T

    def gram_deviation(self) -> float:
        if not self.modes:
            return 0.0
        gram = self.gram()
        return float(np.max(np.abs(gram - np.eye(len(self.modes)))))

    def orthonormalized(self) -> "ModeSet":
        """
        Symmetric (Loewdin) orthonormalization, the orthonormal set closest to these modes

        Leaves already orthonormal sets untouched up to rounding. Raises
        ValidationError for (nearly) linearly dependent modes.
        """
        if not self.modes:
            return self
        gram = self.gram()
        eigenvalues, vectors = np.linalg.eigh(gram)
        if eigenvalues[0] <= 1e-8 * eigenvalues[-1]:
            raise ValidationError("modes are linearly dependent and cannot be orthonormalized")
        inverse_root = (vectors / np.sqrt(eigenvalues)) @ vectors.conj().T
        samples = np.conj(inverse_root) @ self.sample_matrix()
        modes = [
            SpectralFunction(self.grid, row, mode.label, normalized=True)
            for row, mode in zip(samples, self.modes)
        ]
        logger.debug("orthonormalized %d modes (Gram deviation %.3e)", len(modes), self.gram_deviation())
        return ModeSet(tuple(modes), self.centers, orthonormal=True, feasible=self.feasible, spacing=self.spacing)


def place_bins(
    n: int,
    grid: FrequencyGrid,
    omega0: float,
    width: float,
    shape: str = "box"
) -> ModeSet:
    """
    Place n equally spaced bins symmetrically around omega0, outer edges flush with the window

    The usable window is the largest one symmetric about omega0. Neighbouring
    bins closer than their width make the placement infeasible; the returned
    ModeSet then carries the centers but no modes.

    Args:
        n: Number of bins (>= 1)
        grid: Frequency grid
        omega0: Degeneracy point
        width: Bin width (box width D or Gaussian FWHM)
        shape: 'box' or 'gaussian'

    Returns:
        ModeSet with feasible flag
    """
    if n < 1:
        raise ConfigurationError(f"need at least one bin, got {n}")
    if not grid.contains(omega0):
        raise ConfigurationError(f"degeneracy point {omega0} outside grid")
    bin_shape = BinShape(shape, width)
    half_span = min(omega0 - grid.start, grid.stop - omega0)
    span = 2.0 * half_span

    if n == 1:
        centers = [omega0]
        spacing = None
        feasible = width <= span * (1.0 + 1e-12)
    else:
        spacing = (span - width) / (n - 1)
        offsets = (np.arange(n) - 0.5 * (n - 1)) * spacing
        centers = list(omega0 + offsets)
        feasible = spacing >= width * (1.0 - 1e-12)

    if not feasible:
        logger.debug("placement of %d bins of width %.4g infeasible (spacing %s)", n, width, spacing)
        return ModeSet.infeasible(centers, spacing)

    modes = [bin_shape.build(grid, c, f"A{i + 1}", omega0) for i, c in enumerate(centers)]
    placed = ModeSet.from_modes(modes, centers)
    return ModeSet(placed.modes, placed.centers, placed.orthonormal, True, spacing)


def symmetric_bins(grid: FrequencyGrid, omega0: float, offset: float, shape: BinShape) -> ModeSet:
    """Two bins mirrored about the degeneracy point at omega0 -/+ offset"""
    centers = [omega0 - offset, omega0 + offset]
    modes = [shape.build(grid, c, f"A{i + 1}", omega0) for i, c in enumerate(centers)]
    return ModeSet.from_modes(modes, centers)


def superposition_mode(U_row: Sequence[complex], bins: ModeSet, label: str = "") -> SpectralFunction:
    """S(w) = sum_l U_row[l] * A_l(w)"""
    row = np.asarray(U_row, dtype=complex)
    if row.shape != (len(bins),):
        raise UsageError(f"row of length {row.size} for {len(bins)} bins")
    samples = row @ bins.sample_matrix()
    norm = float(np.real(np.vdot(samples, samples)) * bins.grid.step)
    normalized = abs(norm - 1.0) <= 1e-9
    return SpectralFunction(bins.grid, samples, label or "S", normalized=normalized)


def superposition_modes(U: np.ndarray, bins: ModeSet) -> List[SpectralFunction]:
    return [superposition_mode(row, bins, label=f"S{k + 1}") for k, row in enumerate(np.atleast_2d(U))]
