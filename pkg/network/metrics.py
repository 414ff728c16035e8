"""
Gaussian Metrics Module
Purity, squeezing and physicality of covariance matrices
"""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.linalg import block_diag

from guardrails.exceptions import NumericalError, UsageError
from network.covariance import CovarianceMatrix

logger = logging.getLogger(__name__)

PURITY_SLACK = 1e-6
PHYSICAL_TOLERANCE = 1e-6

CovarianceLike = Union[CovarianceMatrix, np.ndarray]


def _as_covariance(sigma: CovarianceLike) -> CovarianceMatrix:
    return sigma if isinstance(sigma, CovarianceMatrix) else CovarianceMatrix(sigma)


@dataclass
class PhysicalityReport:
    symplectic_eigenvalues: np.ndarray
    passed: bool

    @property
    def minimum(self) -> float:
        return float(np.min(self.symplectic_eigenvalues))

    def __iter__(self):
        return iter((self.symplectic_eigenvalues, self.passed))


def purity(sigma: CovarianceLike) -> float:
    """
    gamma = 1 / (2^N sqrt(det sigma))

    Args:
        sigma: Physical covariance matrix

    Returns:
        Purity in (0, 1]; values above 1 + 1e-6 are clamped with a warning
    """
    sigma = _as_covariance(sigma)
    sign, logdet = np.linalg.slogdet(sigma.entries)
    if sign <= 0:
        raise NumericalError("covariance determinant is not positive")
    gamma = float(np.exp(-sigma.n_modes * np.log(2.0) - 0.5 * logdet))
    if gamma > 1.0 + PURITY_SLACK:
        logger.warning("purity %.8f above one, clamped; covariance convention suspect", gamma)
        return 1.0
    return gamma


def squeezing_db(sigma: CovarianceLike) -> float:
    """S = -10 log10(2 a) with a the smallest eigenvalue; positive below vacuum"""
    sigma = _as_covariance(sigma)
    smallest = float(np.linalg.eigvalsh(sigma.entries)[0])
    if smallest <= 0:
        raise NumericalError(f"covariance has non-positive eigenvalue {smallest:.3e}")
    return float(-10.0 * np.log10(2.0 * smallest))


def symplectic_form(n_modes: int) -> np.ndarray:
    return block_diag(*([np.array([[0.0, 1.0], [-1.0, 0.0]])] * n_modes))


def check_physical(sigma: CovarianceLike) -> PhysicalityReport:
    """Symplectic eigenvalues |eig(i Omega sigma)|; physical iff all >= 1/2 - 1e-6"""
    sigma = _as_covariance(sigma)
    omega = symplectic_form(sigma.n_modes)
    eigenvalues = np.sort(np.abs(np.linalg.eigvals(1j * omega @ sigma.entries)))
    symplectic = eigenvalues[::2]
    passed = bool(np.all(symplectic >= 0.5 - PHYSICAL_TOLERANCE))
    if not passed:
        logger.debug("unphysical covariance: smallest symplectic eigenvalue %.6g", symplectic[0])
    return PhysicalityReport(symplectic, passed)


def mode_block(sigma: CovarianceLike, k: int) -> CovarianceMatrix:
    """Reduced single-mode covariance of mode k"""
    sigma = _as_covariance(sigma)
    if not 0 <= k < sigma.n_modes:
        raise UsageError(f"mode {k} out of range for {sigma.n_modes} modes")
    return CovarianceMatrix(sigma.block(k, k))
