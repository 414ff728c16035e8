"""
Bogoliubov Transform Module
Operator matrices of the PDC squeezer and the SFG converter, with commutator checks

All matrices are operator matrices: kernel samples times the quadrature
weight, acting on discrete mode amplitudes b_i = sqrt(step) * b(w_i).
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Union

import numpy as np

from bogoliubov.decompositions import SchmidtData, svd_schmidt, takagi
from guardrails.exceptions import ValidationError
from processes.kernels import KernelKind, ProcessKernel
from spectral.grid import FrequencyGrid

logger = logging.getLogger(__name__)

COMMUTATION_TOLERANCE = 1e-6
OVER_CONVERSION_SLACK = 1e-6


@dataclass(frozen=True, eq=False)
class PDCKernels:
    """b' = U b + V b^dagger on the signal/idler grid"""

    grid: FrequencyGrid
    U: np.ndarray
    V: np.ndarray
    schmidt: Optional[SchmidtData] = None


@dataclass(frozen=True, eq=False)
class SFGKernels:
    """
    a'' = U_a a' - V_a b' on the output grid, b'' = U_b b' + V_b a' on the input grid

    Shapes: U_a (n_out, n_out), V_a (n_out, n_in), U_b (n_in, n_in), V_b (n_in, n_out).
    """

    grid_in: FrequencyGrid
    grid_out: FrequencyGrid
    U_a: np.ndarray
    V_a: np.ndarray
    U_b: np.ndarray
    V_b: np.ndarray
    angles: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass
class CommutationReport:
    """Frobenius residuals of the bosonic commutator conditions"""

    residuals: Dict[str, float]
    tolerance: float = COMMUTATION_TOLERANCE

    @property
    def worst(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    @property
    def passed(self) -> bool:
        return self.worst <= self.tolerance


def pdc_kernels(jsa: ProcessKernel, scale: float = 1.0, max_modes: Optional[int] = None) -> PDCKernels:
    """
    U^P = sum_k phi_k^* cosh(r_k) phi_k and V^P = sum_k phi_k^* sinh(r_k) phi_k^*

    Args:
        jsa: JSA kernel
        scale: Nonnegative factor applied to the kernel (from normalize_jsa)
        max_modes: Keep only the strongest modes; breaks completeness and is
            meant for speed studies guarded by check_commutation

    Returns:
        PDCKernels with operator matrices
    """
    if jsa.kind != KernelKind.JSA:
        raise ValidationError(f"expected a JSA kernel, got {jsa.kind.value}")
    gain = scale * jsa.operator()
    schmidt = takagi(gain, jsa.grid_rows)
    squeezing = schmidt.coefficients
    modes = schmidt.input_vectors()
    if max_modes is not None:
        squeezing, modes = squeezing[:max_modes], modes[:max_modes]
        logger.warning("PDC kernels truncated to %d Schmidt modes", len(squeezing))

    U = modes.conj().T @ (np.cosh(squeezing)[:, np.newaxis] * modes)
    V = modes.conj().T @ (np.sinh(squeezing)[:, np.newaxis] * modes.conj())
    logger.debug("PDC kernels: largest squeezing r = %.4g", squeezing[0] if squeezing.size else 0.0)
    return PDCKernels(jsa.grid_rows, U, V, schmidt)


def sfg_kernels(tf: ProcessKernel) -> SFGKernels:
    """
    Converter kernels from the TF Schmidt decomposition

    U_a = sum psi^* cos psi, V_a = sum psi^* sin phi,
    U_b = sum phi^* cos phi, V_b = sum phi^* sin psi,
    with zero-angle modes completing both bases.
    """
    if tf.kind != KernelKind.TF:
        raise ValidationError(f"expected a TF kernel, got {tf.kind.value}")
    schmidt = svd_schmidt(tf)
    angles = schmidt.coefficients
    if angles.size and angles[0] > np.pi / 2 + OVER_CONVERSION_SLACK:
        logger.warning("Schmidt angle %.6f exceeds pi/2: over-conversion regime", angles[0])

    rows_in = schmidt.input_vectors()
    rows_out = schmidt.output_vectors()
    k = angles.size
    cos_in = np.ones(rows_in.shape[0])
    cos_in[:k] = np.cos(angles)
    cos_out = np.ones(rows_out.shape[0])
    cos_out[:k] = np.cos(angles)
    sines = np.sin(angles)[:, np.newaxis]

    U_a = rows_out.conj().T @ (cos_out[:, np.newaxis] * rows_out)
    V_a = rows_out[:k].conj().T @ (sines * rows_in[:k])
    U_b = rows_in.conj().T @ (cos_in[:, np.newaxis] * rows_in)
    V_b = rows_in[:k].conj().T @ (sines * rows_out[:k])
    return SFGKernels(tf.grid_rows, tf.grid_cols, U_a, V_a, U_b, V_b, angles)


def check_commutation(kernels: Union[PDCKernels, SFGKernels]) -> CommutationReport:
    """
    Residuals of the conditions that keep the transformed operators bosonic

    PDC: U U^dag - V V^dag = I and U V^T symmetric.
    SFG: U_a U_a^dag + V_a V_a^dag = I, U_b U_b^dag + V_b V_b^dag = I and
    U_b^dag U_b + V_a^dag V_a = I (every input quantum ends in one of the two fields).
    """
    if isinstance(kernels, PDCKernels):
        U, V = kernels.U, kernels.V
        identity = np.eye(U.shape[0])
        cross = U @ V.T
        residuals = {
            "UU^dag-VV^dag-I": float(np.linalg.norm(U @ U.conj().T - V @ V.conj().T - identity)),
            "UV^T-symmetry": float(np.linalg.norm(cross - cross.T)),
        }
    else:
        U_a, V_a, U_b, V_b = kernels.U_a, kernels.V_a, kernels.U_b, kernels.V_b
        eye_out = np.eye(U_a.shape[0])
        eye_in = np.eye(U_b.shape[0])
        residuals = {
            "UaUa^dag+VaVa^dag-I": float(np.linalg.norm(U_a @ U_a.conj().T + V_a @ V_a.conj().T - eye_out)),
            "UbUb^dag+VbVb^dag-I": float(np.linalg.norm(U_b @ U_b.conj().T + V_b @ V_b.conj().T - eye_in)),
            "quanta-conservation": float(np.linalg.norm(U_b.conj().T @ U_b + V_a.conj().T @ V_a - eye_in)),
        }
    report = CommutationReport(residuals)
    if not report.passed:
        logger.warning("commutator residual %.3e above %.1e", report.worst, report.tolerance)
    return report
