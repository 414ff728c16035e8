"""
Schmidt Decomposition Module
Takagi factorization of symmetric kernels and SVD-based Schmidt decomposition of TFs
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.linalg import LinAlgError, eigh

from guardrails.exceptions import NumericalError, ValidationError
from processes.kernels import ProcessKernel
from spectral.grid import FrequencyGrid

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-8
RECONSTRUCTION_TOLERANCE = 1e-8
CLUSTER_TOLERANCE = 1e-6
ZERO_TOLERANCE = 1e-11


@dataclass(frozen=True, eq=False)
class SchmidtData:
    """
    Schmidt coefficients with their mode functions

    Rows of input_modes / output_modes are the modes. With grids attached
    they are L2-normalized functions sampled on the grids; without grids
    they are orthonormal discrete vectors. For a JSA the kernel is
    sum_k r_k conj(phi_k(w)) conj(phi_k(w')); for a TF it is
    sum_k r_k phi_k(w_in) conj(psi_k(w_out)).
    """

    coefficients: np.ndarray
    input_modes: np.ndarray
    output_modes: np.ndarray
    grid_rows: Optional[FrequencyGrid] = None
    grid_cols: Optional[FrequencyGrid] = None

    @property
    def rank(self) -> int:
        return int(self.coefficients.size)

    def input_vectors(self) -> np.ndarray:
        if self.grid_rows is None:
            return self.input_modes
        return self.input_modes * np.sqrt(self.grid_rows.step)

    def output_vectors(self) -> np.ndarray:
        if self.grid_cols is None:
            return self.output_modes
        return self.output_modes * np.sqrt(self.grid_cols.step)

    def significant(self, threshold: float = 1e-8) -> np.ndarray:
        """Coefficients above threshold times the largest"""
        if self.rank == 0 or self.coefficients[0] == 0:
            return self.coefficients[:0]
        return self.coefficients[self.coefficients > threshold * self.coefficients[0]]


def _cluster_indices(values: np.ndarray) -> List[np.ndarray]:
    """Group descending singular values whose relative gaps fall below CLUSTER_TOLERANCE"""
    clusters = []
    current = [0]
    for index in range(1, values.size):
        if values[index - 1] - values[index] <= CLUSTER_TOLERANCE * values[0]:
            current.append(index)
        else:
            clusters.append(np.array(current))
            current = [index]
    clusters.append(np.array(current))
    return clusters


def _small_takagi(block: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Takagi factorization block = Y diag(d) Y^T of a small symmetric matrix

    Uses the real symmetric embedding [[Re, Im], [Im, -Re]], whose positive
    eigenpairs (d, [x; y]) give the Takagi vectors x + i y.
    """
    k = block.shape[0]
    embedding = np.block([[block.real, block.imag], [block.imag, -block.real]])
    eigenvalues, eigenvectors = eigh(embedding)
    order = np.argsort(eigenvalues)[::-1][:k]
    vectors = eigenvectors[:k, order] + 1j * eigenvectors[k:, order]
    return eigenvalues[order], vectors


def takagi(K: np.ndarray, grid: Optional[FrequencyGrid] = None) -> SchmidtData:
    """
    Autonne-Takagi factorization K = conj(Phi)^T diag(r) conj(Phi)

    Runs an SVD, groups (near-)degenerate singular values and, per cluster,
    factorizes the projected block so the Takagi vectors stay exact across
    degeneracies. Vectors below ZERO_TOLERANCE of the largest value only complete the basis.

    Args:
        K: Complex symmetric matrix (symmetrized if within tolerance)
        grid: Optional grid; when given, modes are returned as functions

    Returns:
        SchmidtData with r descending and Phi rows in input_modes (= output_modes)
    """
    K = np.asarray(K, dtype=complex)
    scale = np.linalg.norm(K)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValidationError(f"Takagi factorization needs a square matrix, got {K.shape}")
    if np.linalg.norm(K - K.T) > SYMMETRY_TOLERANCE * scale:
        raise ValidationError("matrix is not symmetric within tolerance")
    n = K.shape[0]
    if scale == 0:
        return _as_schmidt(np.zeros(n), np.eye(n, dtype=complex), grid)
    K = 0.5 * (K + K.T)

    try:
        V, singular_values, _ = np.linalg.svd(K)
    except LinAlgError as exc:
        raise NumericalError(f"SVD failed during Takagi factorization: {exc}") from exc

    largest = singular_values[0]
    takagi_vectors = np.array(V, dtype=complex)
    coefficients = np.array(singular_values)
    significant = int(np.count_nonzero(singular_values > ZERO_TOLERANCE * largest))
    for indices in _cluster_indices(singular_values[:significant]):
        basis = V[:, indices]
        block = basis.conj().T @ K @ basis.conj()
        try:
            values, rotation = _small_takagi(0.5 * (block + block.T))
        except LinAlgError as exc:
            raise NumericalError(f"cluster factorization failed: {exc}") from exc
        takagi_vectors[:, indices] = basis @ rotation
        coefficients[indices] = values

    order = np.argsort(-coefficients, kind="stable")
    coefficients = np.clip(coefficients[order], 0.0, None)
    takagi_vectors = takagi_vectors[:, order]

    residual = np.linalg.norm(K - (takagi_vectors * coefficients) @ takagi_vectors.T) / scale
    logger.debug("Takagi factorization of %dx%d, residual %.3e", n, n, residual)
    if residual > RECONSTRUCTION_TOLERANCE:
        raise NumericalError(f"Takagi reconstruction residual {residual:.3e} too large")
    return _as_schmidt(coefficients, takagi_vectors.conj().T, grid)


def _as_schmidt(coefficients: np.ndarray, rows: np.ndarray, grid: Optional[FrequencyGrid]) -> SchmidtData:
    modes = rows if grid is None else rows / np.sqrt(grid.step)
    return SchmidtData(coefficients, modes, modes, grid, grid)


def svd_schmidt(K: Union[ProcessKernel, np.ndarray]) -> SchmidtData:
    """
    Schmidt decomposition by SVD of the operator matrix

    For a ProcessKernel the samples are weighted by sqrt(step_rows * step_cols)
    and the singular vectors divided by sqrt(step), so coefficients approximate
    the continuum Schmidt coefficients and modes are L2-orthonormal functions.
    Full bases are returned on both axes.
    """
    if isinstance(K, ProcessKernel):
        matrix, grid_rows, grid_cols = K.operator(), K.grid_rows, K.grid_cols
    else:
        matrix, grid_rows, grid_cols = np.asarray(K, dtype=complex), None, None
    if not np.any(matrix):
        logger.debug("Schmidt decomposition of a zero kernel")
    try:
        W, coefficients, Xh = np.linalg.svd(matrix)
    except LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from exc

    input_modes = W.T
    output_modes = Xh.conj()
    if grid_rows is not None:
        input_modes = input_modes / np.sqrt(grid_rows.step)
        output_modes = output_modes / np.sqrt(grid_cols.step)
    return SchmidtData(coefficients, input_modes, output_modes, grid_rows, grid_cols)
