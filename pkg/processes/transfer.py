"""
mQPG Transfer Function Module
Separable multi-output TFs, pump-driven TFs and conversion-efficiency scaling
"""

import logging
from typing import List, Tuple

import numpy as np
from scipy.linalg import LinAlgError, svdvals

from guardrails.exceptions import ConfigurationError, NumericalError, UsageError, ValidationError
from processes.kernels import KernelKind, PhasematchingModel, ProcessKernel
from spectral.grid import FrequencyGrid, SpectralFunction, sample_function
from spectral.modes import ModeSet
from spectral.pump import NetworkUnitary

logger = logging.getLogger(__name__)

GRAM_TOLERANCE = 1e-4
RANK_THRESHOLD = 1e-8
UNITY_ANGLE = np.pi / 2.0


def build_mqpg_tf(U: NetworkUnitary, input_bins: ModeSet, output_peaks: ModeSet) -> ProcessKernel:
    """
    G(w_in, w_out) = sum_m S_m(w_in) O_m(w_out) with S_m = sum_l U_ml A_l

    Args:
        U: Network matrix, N_out x N_in
        input_bins: Orthonormal input bins A_l
        output_peaks: Orthonormal output modes O_m

    Returns:
        TF kernel carrying its separable factors (S, O)
    """
    if len(input_bins) != U.n_in or len(output_peaks) != U.n_out:
        raise UsageError(
            f"{len(input_bins)} bins / {len(output_peaks)} outputs for a {U.n_out}x{U.n_in} network"
        )
    for name, modes in (("input bins", input_bins), ("output peaks", output_peaks)):
        deviation = modes.gram_deviation()
        if deviation > GRAM_TOLERANCE:
            raise ValidationError(f"{name} are not orthonormal (Gram deviation {deviation:.3e})")

    superposition = U.entries @ input_bins.sample_matrix()
    outputs = output_peaks.sample_matrix()
    values = superposition.T @ outputs
    return ProcessKernel(
        input_bins.grid, output_peaks.grid, values, KernelKind.TF, factors=(superposition, outputs)
    )


def build_tf_from_pump_pm(
    pump: SpectralFunction,
    pm: PhasematchingModel,
    grid_in: FrequencyGrid,
    grid_out: FrequencyGrid
) -> ProcessKernel:
    """G(w_in, w_out) = P(w_out - w_in) * sum_m O_m(w_out)"""
    if pm.orientation != "horizontal":
        raise ConfigurationError("an mQPG transfer function needs horizontal phasematching")
    low, high = grid_out.start - grid_in.stop, grid_out.stop - grid_in.start
    if not (pump.grid.contains(low) and pump.grid.contains(high)):
        raise ConfigurationError(
            f"pump grid [{pump.grid.start}, {pump.grid.stop}] does not cover difference frequencies [{low}, {high}]"
        )
    differences = grid_out.points[np.newaxis, :] - grid_in.points[:, np.newaxis]
    differences = np.clip(differences, pump.grid.start, pump.grid.stop)
    values = sample_function(pump, differences) * pm.evaluate(grid_in, grid_out)
    return ProcessKernel(grid_in, grid_out, values, KernelKind.TF)


def schmidt_angles(tf: ProcessKernel) -> np.ndarray:
    """Singular values of the TF operator matrix, descending"""
    if tf.kind != KernelKind.TF:
        raise ValidationError(f"expected a TF kernel, got {tf.kind.value}")
    try:
        return svdvals(tf.operator())
    except (LinAlgError, ValueError) as exc:
        raise NumericalError(f"singular values of the TF failed: {exc}") from exc


def set_conversion_unity(tf: ProcessKernel) -> Tuple[ProcessKernel, List[float]]:
    """
    Rescale a TF so that its largest Schmidt angle is pi/2

    Args:
        tf: Nonzero TF kernel

    Returns:
        Tuple of (rescaled TF, significant Schmidt angles after rescaling)
    """
    angles = schmidt_angles(tf)
    largest = angles[0] if angles.size else 0.0
    if largest <= 0:
        raise ValidationError("cannot set the conversion of a zero TF")
    scale = UNITY_ANGLE / largest
    scaled_angles = angles * scale
    significant = [float(a) for a in scaled_angles if a > RANK_THRESHOLD * UNITY_ANGLE]
    logger.info("TF rescaled by %.6g; %d significant conversion angles", scale, len(significant))
    return tf.scaled(scale), significant
