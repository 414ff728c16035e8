"""
JSA Normalization Module
Mean photon number of a PDC kernel and bisection to a target photon number
"""

import logging
from typing import Tuple

import numpy as np
from scipy.linalg import LinAlgError, svdvals
from scipy.optimize import bisect

from guardrails.exceptions import ConfigurationError, NumericalError, ValidationError
from processes.kernels import KernelKind, ProcessKernel

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 200
RELATIVE_TOLERANCE = 1e-6


def gain_coefficients(jsa: ProcessKernel) -> np.ndarray:
    """
    Takagi coefficients of the unit-scale gain matrix K * step

    For a complex symmetric matrix they coincide with the singular values,
    so the squeezing parameters at any scale s are s times these.
    """
    if jsa.kind != KernelKind.JSA:
        raise ValidationError(f"expected a JSA kernel, got {jsa.kind.value}")
    try:
        return svdvals(jsa.operator())
    except (LinAlgError, ValueError) as exc:
        raise NumericalError(f"singular values of the gain matrix failed: {exc}") from exc


def photon_number_from_coefficients(coefficients: np.ndarray, scale: float) -> float:
    return float(np.sum(np.sinh(scale * coefficients) ** 2))


def mean_photon_number(jsa: ProcessKernel, scale: float) -> float:
    """
    Mean photon number sum_k sinh^2(r_k) of the PDC state

    Args:
        jsa: JSA kernel
        scale: Nonnegative real factor applied to the kernel

    Returns:
        Mean photon number inside the simulation window
    """
    if scale < 0:
        raise ConfigurationError(f"scale must be nonnegative, got {scale}")
    return photon_number_from_coefficients(gain_coefficients(jsa), scale)


def normalize_jsa(jsa: ProcessKernel, target_n: float) -> Tuple[ProcessKernel, float]:
    """
    Scale a JSA so that its mean photon number equals target_n

    The photon number is strictly increasing in the scale, so a bracket
    [0, s_hi] is grown by doubling and then bisected.

    Args:
        jsa: Nonzero JSA kernel
        target_n: Target mean photon number (0 returns the zero kernel)

    Returns:
        Tuple of (scaled kernel, scale)
    """
    if target_n < 0:
        raise ConfigurationError(f"target photon number must be nonnegative, got {target_n}")
    coefficients = gain_coefficients(jsa)
    if not np.any(coefficients > 0):
        raise ValidationError("cannot normalize a zero JSA")
    if target_n == 0:
        return jsa.scaled(0.0), 0.0

    def objective(scale: float) -> float:
        return photon_number_from_coefficients(coefficients, scale) - target_n

    # small-gain guess from sinh(x) ~ x
    high = np.sqrt(target_n / np.sum(coefficients ** 2))
    iterations = 0
    while objective(high) < 0:
        high *= 2.0
        iterations += 1
        if iterations > MAX_ITERATIONS:
            raise NumericalError(f"could not bracket photon number {target_n}")

    try:
        scale = bisect(objective, 0.0, high, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITERATIONS)
    except RuntimeError as exc:
        raise NumericalError(f"normalization to n = {target_n} did not converge: {exc}") from exc

    achieved = photon_number_from_coefficients(coefficients, scale)
    if abs(achieved - target_n) > RELATIVE_TOLERANCE * target_n:
        raise NumericalError(f"normalization reached n = {achieved}, target {target_n}")
    logger.info("JSA normalized to n = %.6g with scale %.6g", target_n, scale)
    return jsa.scaled(scale), float(scale)
