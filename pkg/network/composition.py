"""
Network Composition Module
Amplitude functions of the mQPG output modes after PDC followed by SFG
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from bogoliubov.decompositions import svd_schmidt
from bogoliubov.transforms import PDCKernels, SFGKernels
from guardrails.exceptions import UsageError, ValidationError
from processes.kernels import KernelKind, ProcessKernel
from spectral.grid import FrequencyGrid, SpectralFunction
from spectral.modes import ORTHONORMAL_TOLERANCE, ModeSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CompositeAmplitudes:
    """
    O''_k = int H1_k a' + int H2_k b + int H3_k b^dagger, one row per output mode

    h1 lives on grid_out, h2 and h3 on grid_in. Rows are sampled functions.
    """

    h1: np.ndarray
    h2: np.ndarray
    h3: np.ndarray
    grid_out: FrequencyGrid
    grid_in: FrequencyGrid

    @classmethod
    def from_vectors(
        cls,
        h1: np.ndarray,
        h2: np.ndarray,
        h3: np.ndarray,
        grid_out: FrequencyGrid,
        grid_in: FrequencyGrid
    ) -> "CompositeAmplitudes":
        """Build from discrete vectors (function samples times sqrt(step))"""
        return cls(
            h1 / np.sqrt(grid_out.step),
            h2 / np.sqrt(grid_in.step),
            h3 / np.sqrt(grid_in.step),
            grid_out,
            grid_in,
        )

    @property
    def n_modes(self) -> int:
        return self.h1.shape[0]

    def vectors(self):
        """Discrete (h1, h2, h3) so that integrals become plain sums"""
        root_out = np.sqrt(self.grid_out.step)
        root_in = np.sqrt(self.grid_in.step)
        return self.h1 * root_out, self.h2 * root_in, self.h3 * root_in

    def commutator_norms(self) -> np.ndarray:
        """|H1_k|^2 + |H2_k|^2 - |H3_k|^2 per mode; 1 for a bosonic output"""
        h1, h2, h3 = self.vectors()
        return (
            np.sum(np.abs(h1) ** 2, axis=1)
            + np.sum(np.abs(h2) ** 2, axis=1)
            - np.sum(np.abs(h3) ** 2, axis=1)
        )

    @property
    def commutator_residual(self) -> float:
        norms = self.commutator_norms()
        return float(np.max(np.abs(norms - 1.0))) if norms.size else 0.0


def compose(pdc: PDCKernels, sfg: SFGKernels, outputs: ModeSet) -> CompositeAmplitudes:
    """
    Contract the SFG and PDC kernels with the output modes

    H1_k = int O_k U_a, H2_k = -int O_k V_a U^P, H3_k = -int O_k V_a V^P.

    Args:
        pdc: PDC kernels on the input grid
        sfg: SFG kernels between input and output grids
        outputs: Output modes O_k on the output grid

    Returns:
        CompositeAmplitudes for every output mode
    """
    if pdc.grid != sfg.grid_in:
        raise UsageError("PDC grid and SFG input grid differ")
    if not outputs.modes or outputs.grid != sfg.grid_out:
        raise UsageError("output modes must live on the SFG output grid")

    o = outputs.vectors()
    h1 = o @ sfg.U_a
    converted = o @ sfg.V_a
    h2 = -(converted @ pdc.U)
    h3 = -(converted @ pdc.V)
    amplitudes = CompositeAmplitudes.from_vectors(h1, h2, h3, sfg.grid_out, sfg.grid_in)
    logger.debug("composed %d output modes, commutator residual %.2e",
                 amplitudes.n_modes, amplitudes.commutator_residual)
    return amplitudes


def pdc_bin_amplitudes(pdc: PDCKernels, bins: ModeSet) -> CompositeAmplitudes:
    """Broadband bin operators A'_k = int A_k b' of the PDC state alone (H1 = 0)"""
    if not bins.modes or bins.grid != pdc.grid:
        raise UsageError("bins must live on the PDC grid")
    deviation = bins.gram_deviation()
    if deviation > ORTHONORMAL_TOLERANCE:
        raise ValidationError(f"bins are not orthonormal (Gram deviation {deviation:.3e})")
    a = bins.vectors()
    h1 = np.zeros_like(a)
    return CompositeAmplitudes.from_vectors(h1, a @ pdc.U, a @ pdc.V, pdc.grid, pdc.grid)


def schmidt_output_modes(tf: ProcessKernel, count: int, references: Optional[ModeSet] = None) -> ModeSet:
    """
    Output Schmidt modes psi_k of a TF as a ModeSet

    The converted mode of the k-th Schmidt pair is R_k = int psi_k a, so these
    functions are valid output modes for compose. Near-degenerate Schmidt
    values leave the SVD free to mix modes; with `references` the span of the
    first `count` modes is rotated onto the closest orthonormal set to the
    reference peaks (symmetric orthonormalization of their projections).

    Args:
        tf: TF kernel
        count: Number of leading Schmidt modes
        references: Optional peaks on the TF output grid, one per mode

    Returns:
        ModeSet of R1..R<count>; centers are the peak positions or the reference centers
    """
    if tf.kind != KernelKind.TF:
        raise ValidationError(f"expected a TF kernel, got {tf.kind.value}")
    schmidt = svd_schmidt(tf)
    if not 1 <= count <= schmidt.output_modes.shape[0]:
        raise UsageError(f"cannot take {count} output modes from a TF with {schmidt.output_modes.shape[0]}")
    grid = tf.grid_cols
    leading = schmidt.output_modes[:count]

    if references is not None:
        if len(references) != count or references.grid != grid:
            raise UsageError(f"need {count} reference peaks on the TF output grid")
        basis = leading * np.sqrt(grid.step)
        overlaps = references.vectors().conj() @ basis.T
        left, _, right_h = np.linalg.svd(overlaps.conj())
        rotated = (left @ right_h) @ leading
        modes = [SpectralFunction(grid, rotated[k], f"R{k + 1}", normalized=True) for k in range(count)]
        return ModeSet.from_modes(modes, references.centers)

    modes = []
    centers = []
    for k in range(count):
        samples = leading[k]
        peak = int(np.argmax(np.abs(samples)))
        # fix the global phase so the peak sample is real positive
        samples = samples * np.exp(-1j * np.angle(samples[peak]))
        modes.append(SpectralFunction(grid, samples, f"R{k + 1}", normalized=True))
        centers.append(grid.points[peak])
    return ModeSet.from_modes(modes, centers)
