"""
Frequency Beamsplitter Demo Module
Full PDC -> mQPG pipeline mapping two mirrored bins onto two output peaks
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from bogoliubov.transforms import check_commutation, pdc_kernels, sfg_kernels
from network.composition import compose, schmidt_output_modes
from network.covariance import CovarianceMatrix, covariance_from_amplitudes, ideal_output_oracle, pdc_bin_covariance
from network.metrics import check_physical, mode_block, purity, squeezing_db
from processes.jsa import build_type0_jsa
from processes.kernels import PhasematchingModel, ProcessKernel
from processes.normalization import normalize_jsa
from processes.transfer import build_mqpg_tf, build_tf_from_pump_pm, set_conversion_unity
from spectral.grid import FrequencyGrid, make_grid
from spectral.modes import BinShape, ModeSet, gaussian_bin, symmetric_bins
from spectral.pump import NetworkUnitary, balanced_beamsplitter, synthesize_pump
from guardrails.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

INPUT_WINDOW = (0.0, 1.0)
DEGENERACY_POINT = 0.5


@dataclass
class DemoResult:
    jsa: ProcessKernel
    tf: ProcessKernel
    sigma_pdc: CovarianceMatrix
    sigma_out: CovarianceMatrix
    metrics: Dict[str, object]
    oracle: Optional[CovarianceMatrix] = None
    conversion_angles: Tuple[float, ...] = field(default_factory=tuple)


def output_peaks(grid: FrequencyGrid, centers: Tuple[float, ...], fwhm: float) -> ModeSet:
    modes = [gaussian_bin(grid, c, fwhm, label=f"O{m + 1}") for m, c in enumerate(centers)]
    return ModeSet.from_modes(modes, centers)


def pump_driven_tf(
    U: NetworkUnitary,
    bins: ModeSet,
    grid_out: FrequencyGrid,
    out_centers: Tuple[float, ...],
    bin_shape: BinShape,
    pm_width: float
) -> ProcessKernel:
    """TF realized by a programmed pump and a multi-peak horizontal phasematching"""
    grid_in = bins.grid
    low, high = grid_out.start - grid_in.stop, grid_out.stop - grid_in.start
    n_pump = int(round((high - low) / min(grid_in.step, grid_out.step))) + 1
    pump_grid = make_grid(low, high, n_pump)
    pump = synthesize_pump(U, bins.centers, out_centers, bin_shape, pump_grid)
    pm = PhasematchingModel("gaussian", pm_width, "horizontal", out_centers)
    return build_tf_from_pump_pm(pump, pm, grid_in, grid_out)


def run_beamsplitter_demo(
    grid_n: int = 1500,
    fwhm_jsa: float = 0.05,
    fwhm_bin: float = 0.1,
    mean_photons: float = 1.0,
    bin_offset: float = 0.25,
    output_window: Tuple[float, float] = (0.0, 2.0),
    output_centers: Tuple[float, float] = (0.5, 1.5),
    output_fwhm: float = 0.1,
    tf_source: str = "ideal",
    pm_width: float = 0.02,
    jsa_profile: str = "gaussian"
) -> DemoResult:
    """
    Simulate the balanced frequency beamsplitter

    Widths and positions are in units of the input window [0, 1] with the
    degeneracy point at 0.5.

    Args:
        grid_n: Points per frequency axis
        fwhm_jsa: JSA cross-section FWHM
        fwhm_bin: Gaussian bin FWHM
        mean_photons: Target mean photon number of the PDC state
        bin_offset: Distance of each bin from the degeneracy point
        output_window: Output frequency axis bounds
        output_centers: Output peak centers O1, O2
        output_fwhm: Output peak FWHM
        tf_source: 'ideal' separable TF or 'pump' programmed pump times phasematching
        pm_width: mQPG phasematching FWHM, used with tf_source 'pump'
        jsa_profile: 'gaussian' or 'sinc'

    Returns:
        DemoResult with kernels, covariances and metrics
    """
    if tf_source not in ("ideal", "pump"):
        raise ConfigurationError(f"unknown TF source '{tf_source}'", key_path="demo.tf_source")

    grid_in = make_grid(*INPUT_WINDOW, grid_n)
    grid_out = make_grid(output_window[0], output_window[1], grid_n)
    U = balanced_beamsplitter()
    bin_shape = BinShape("gaussian", fwhm_bin)
    bins = symmetric_bins(grid_in, DEGENERACY_POINT, bin_offset, bin_shape)
    outputs = output_peaks(grid_out, tuple(output_centers), output_fwhm)

    jsa = build_type0_jsa(grid_in, DEGENERACY_POINT, fwhm_jsa, jsa_profile)
    jsa, scale = normalize_jsa(jsa, mean_photons)
    pdc = pdc_kernels(jsa)

    if tf_source == "ideal":
        tf = build_mqpg_tf(U, bins, outputs)
    else:
        tf = pump_driven_tf(U, bins, grid_out, tuple(output_centers), bin_shape, pm_width)
    tf, angles = set_conversion_unity(tf)
    if tf_source == "pump":
        outputs = schmidt_output_modes(tf, U.n_out, references=outputs)
    sfg = sfg_kernels(tf)

    sigma_pdc = pdc_bin_covariance(pdc, bins)
    amplitudes = compose(pdc, sfg, outputs)
    sigma_out = covariance_from_amplitudes(amplitudes)
    oracle = ideal_output_oracle(U, sigma_pdc) if tf_source == "ideal" else None

    pdc_check = check_commutation(pdc)
    sfg_check = check_commutation(sfg)
    physical = check_physical(sigma_out)
    metrics = {
        "scale": scale,
        "purity": purity(sigma_out),
        "squeezing_db": squeezing_db(sigma_out),
        "purity_pdc": purity(sigma_pdc),
        "symplectic_min": physical.minimum,
        "physical": physical.passed,
        "mode_purity": [purity(mode_block(sigma_out, k)) for k in range(sigma_out.n_modes)],
        "mode_squeezing_db": [squeezing_db(mode_block(sigma_out, k)) for k in range(sigma_out.n_modes)],
        "commutator_residual_pdc": pdc_check.worst,
        "commutator_residual_sfg": sfg_check.worst,
        "amplitude_residual": amplitudes.commutator_residual,
        "conversion_angles": list(angles),
    }
    if oracle is not None:
        metrics["oracle_deviation"] = float(np.max(np.abs(sigma_out.entries - oracle.entries)))
    logger.info("beamsplitter demo: purity %.6f, squeezing %.4f dB", metrics["purity"], metrics["squeezing_db"])
    return DemoResult(jsa, tf, sigma_pdc, sigma_out, metrics, oracle, tuple(angles))
