"""
Covariance Matrix Module
Quadrature covariance of Gaussian output modes in the (X1, Y1, X2, Y2, ...) ordering

X = (O + O^dagger)/sqrt(2), Y = (O - O^dagger)/(i sqrt(2)); vacuum variance 1/2.
"""

import logging
from dataclasses import dataclass

import numpy as np

from bogoliubov.transforms import PDCKernels
from guardrails.exceptions import UsageError, ValidationError
from network.composition import CompositeAmplitudes, pdc_bin_amplitudes
from spectral.modes import ModeSet
from spectral.pump import NetworkUnitary

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Real symmetric 2N x 2N covariance, vacuum = I/2"""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] % 2:
            raise ValidationError(f"covariance must be square with even size, got {entries.shape}")
        scale = max(1.0, float(np.max(np.abs(entries)))) if entries.size else 1.0
        if np.max(np.abs(entries - entries.T), initial=0.0) > SYMMETRY_TOLERANCE * scale:
            raise ValidationError("covariance matrix is not symmetric")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n_modes(self) -> int:
        return self.entries.shape[0] // 2

    def block(self, k: int, l: int) -> np.ndarray:
        """2x2 submatrix between modes k and l"""
        return self.entries[2 * k:2 * k + 2, 2 * l:2 * l + 2]

    def as_array(self) -> np.ndarray:
        return np.array(self.entries)


def vacuum_covariance(n_modes: int) -> CovarianceMatrix:
    return CovarianceMatrix(0.5 * np.eye(2 * n_modes))


def covariance_from_amplitudes(amps: CompositeAmplitudes) -> CovarianceMatrix:
    """
    Assemble sigma from the vacuum moments of the output operators

    <O_k O_l> = int H2_k H3_l, <O_k O_l^dag> = int H1_k H1_l^* + int H2_k H2_l^*,
    <O_k^dag O_l> = int H3_k^* H3_l, <O_k^dag O_l^dag> = int H3_k^* H2_l^*.
    Displacements vanish for vacuum inputs.
    """
    h1, h2, h3 = amps.vectors()
    m_aa = h2 @ h3.T
    n_ad = h1 @ h1.conj().T + h2 @ h2.conj().T
    n_da = h3.conj() @ h3.T
    m_dd = np.conj(h3 @ h2.T)

    xx = 0.5 * (m_aa + n_ad + n_da + m_dd)
    xy = (m_aa - n_ad + n_da - m_dd) / 2j
    yx = (m_aa + n_ad - n_da - m_dd) / 2j
    yy = -0.5 * (m_aa - n_ad - n_da + m_dd)

    sigma_xx = np.real(0.5 * (xx + xx.T))
    sigma_yy = np.real(0.5 * (yy + yy.T))
    sigma_xy = np.real(0.5 * (xy + yx.T))

    n = amps.n_modes
    entries = np.empty((2 * n, 2 * n))
    entries[0::2, 0::2] = sigma_xx
    entries[1::2, 1::2] = sigma_yy
    entries[0::2, 1::2] = sigma_xy
    entries[1::2, 0::2] = sigma_xy.T
    return CovarianceMatrix(entries)


def pdc_bin_covariance(pdc: PDCKernels, bins: ModeSet) -> CovarianceMatrix:
    """Covariance between broadband bins of the PDC state"""
    return covariance_from_amplitudes(pdc_bin_amplitudes(pdc, bins))


def symplectic_embedding(U: np.ndarray) -> np.ndarray:
    """Real 2N x 2N matrix acting on (X, Y) pairs, block (m, l) = [[Re U, -Im U], [Im U, Re U]]"""
    U = np.asarray(U, dtype=complex)
    S = np.empty((2 * U.shape[0], 2 * U.shape[1]))
    S[0::2, 0::2] = U.real
    S[0::2, 1::2] = -U.imag
    S[1::2, 0::2] = U.imag
    S[1::2, 1::2] = U.real
    return S


def ideal_output_oracle(U: NetworkUnitary, sigma_bins: CovarianceMatrix) -> CovarianceMatrix:
    """
    Output covariance of an ideal unity-conversion network, S_U sigma S_U^T

    Args:
        U: Square unitary network matrix
        sigma_bins: Covariance of the input bins

    Returns:
        Transformed covariance (overall mode signs cancel)
    """
    if not U.is_square:
        raise ValidationError(f"oracle needs a square unitary, got {U.n_out}x{U.n_in}")
    if sigma_bins.n_modes != U.n_in:
        raise UsageError(f"covariance of {sigma_bins.n_modes} modes for a {U.n_in}-mode network")
    S = symplectic_embedding(U.entries)
    transformed = S @ sigma_bins.entries @ S.T
    return CovarianceMatrix(0.5 * (transformed + transformed.T))


def tms_covariance(r: float) -> CovarianceMatrix:
    """Two-mode squeezed vacuum: diagonals cosh(2r)/2, <X1X2> = +sinh(2r)/2, <Y1Y2> = -sinh(2r)/2"""
    c, s = 0.5 * np.cosh(2.0 * r), 0.5 * np.sinh(2.0 * r)
    entries = np.diag([c, c, c, c])
    entries[0, 2] = entries[2, 0] = s
    entries[1, 3] = entries[3, 1] = -s
    return CovarianceMatrix(entries)


def fit_tms_r(sigma: CovarianceMatrix) -> float:
    """Squeezing parameter r from the mean diagonal of a two-mode covariance"""
    if sigma.n_modes != 2:
        raise UsageError(f"TMS fit needs two modes, got {sigma.n_modes}")
    mean_variance = float(np.mean(np.diag(sigma.entries)))
    return 0.5 * float(np.arccosh(max(2.0 * mean_variance, 1.0)))
