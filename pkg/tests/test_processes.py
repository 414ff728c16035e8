"""Tests for JSA construction, photon-number normalization and mQPG transfer functions"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from experiments.demo import output_peaks, pump_driven_tf
from guardrails.exceptions import ConfigurationError, ResolutionError, UsageError, ValidationError
from processes.jsa import build_jsa_from_pump_pm, build_type0_jsa, cross_section_fwhm
from processes.kernels import KernelKind, PhasematchingModel, ProcessKernel
from processes.normalization import gain_coefficients, mean_photon_number, normalize_jsa
from processes.transfer import build_mqpg_tf, build_tf_from_pump_pm, schmidt_angles, set_conversion_unity
from spectral.grid import constant_function, make_grid, zero_function
from spectral.modes import BinShape, ModeSet, gaussian_bin
from spectral.pump import NetworkUnitary, balanced_beamsplitter


def _relative_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius distance of unit-normalized kernels after aligning the global phase"""
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    overlap = np.vdot(a, b)
    b = b * np.exp(-1j * np.angle(overlap))
    return float(np.linalg.norm(a - b))


# JSA

def test_type0_jsa_uniform_along_antidiagonal(grid):
    kernel = build_type0_jsa(grid, 0.5, 0.05)
    center = grid.n_points // 2
    for offset in (1, 20, 100, 150):
        assert_allclose(kernel.values[center + offset, center - offset], kernel.values[center, center], atol=1e-12)
    assert_allclose(np.abs(kernel.values).max(), 1.0)


def test_type0_jsa_symmetric(grid):
    kernel = build_type0_jsa(grid, 0.5, 0.05, profile="sinc")
    assert kernel.kind == KernelKind.JSA
    assert np.array_equal(kernel.values, kernel.values.T)


@pytest.mark.parametrize("profile", ["gaussian", "sinc"])
def test_type0_jsa_cross_section_width(grid, profile):
    kernel = build_type0_jsa(grid, 0.5, 0.05, profile)
    assert_allclose(cross_section_fwhm(kernel, 0.5), 0.05, atol=grid.step)


def test_type0_jsa_guards(grid):
    with pytest.raises(ResolutionError):
        build_type0_jsa(grid, 0.5, 3 * grid.step)
    with pytest.raises(ConfigurationError):
        build_type0_jsa(grid, 1.5, 0.05)


def test_jsa_from_constant_pump_matches_type0(grid):
    pump = constant_function(make_grid(0.0, 2.0, 601), 1.0)
    pm = PhasematchingModel("gaussian", 0.05, "antidiagonal", (0.5,))
    from_pump = build_jsa_from_pump_pm(pump, pm, grid)
    assert_allclose(from_pump.values, build_type0_jsa(grid, 0.5, 0.05).values, atol=1e-9)


def test_jsa_from_narrow_pump_stays_on_stripe(grid):
    pump_grid = make_grid(0.0, 2.0, 2001)
    pump = gaussian_bin(pump_grid, 1.0, 0.02)
    pm = PhasematchingModel("gaussian", 0.2, "antidiagonal", (0.5,))
    kernel = build_jsa_from_pump_pm(pump, pm, grid)
    detuning = np.abs(grid.points[:, np.newaxis] + grid.points[np.newaxis, :] - 1.0)
    magnitude = np.abs(kernel.values)
    assert magnitude[detuning > 0.1].max() < 1e-3 * magnitude.max()


def test_jsa_from_zero_pump_is_zero(grid):
    pm = PhasematchingModel("gaussian", 0.05, "antidiagonal", (0.5,))
    kernel = build_jsa_from_pump_pm(zero_function(make_grid(0.0, 2.0, 601)), pm, grid)
    assert kernel.is_zero()


def test_jsa_from_pump_needs_sum_range(grid):
    pm = PhasematchingModel("gaussian", 0.05, "antidiagonal", (0.5,))
    with pytest.raises(ConfigurationError):
        build_jsa_from_pump_pm(constant_function(make_grid(0.5, 1.5, 301)), pm, grid)


def test_kernel_rejects_asymmetric_jsa(grid):
    values = np.zeros((grid.n_points, grid.n_points))
    values[0, 1] = 1.0
    with pytest.raises(ValidationError):
        ProcessKernel(grid, grid, values, KernelKind.JSA)
    with pytest.raises(UsageError):
        ProcessKernel(grid, grid, np.zeros((3, 3)), KernelKind.TF)


@pytest.mark.parametrize(
    "profile, width, orientation, centers",
    [("lorentz", 0.1, "horizontal", (0.5,)), ("gaussian", -0.1, "horizontal", (0.5,)),
     ("gaussian", 0.1, "vertical", (0.5,)), ("gaussian", 0.1, "horizontal", (0.5, 0.55)),
     ("gaussian", 0.1, "antidiagonal", (0.3, 0.7))],
)
def test_phasematching_model_rejects(profile, width, orientation, centers):
    with pytest.raises(ConfigurationError):
        PhasematchingModel(profile, width, orientation, centers)


# Normalization

def test_mean_photon_number_at_zero_scale(jsa):
    assert mean_photon_number(jsa, 0.0) == 0.0


def test_mean_photon_number_low_gain_is_quadratic(grid):
    kernel = build_type0_jsa(grid, 0.5, 0.05)
    scale = 1e-2 / np.linalg.norm(gain_coefficients(kernel))
    assert mean_photon_number(kernel, scale) < 1e-3
    ratio = mean_photon_number(kernel, 2 * scale) / mean_photon_number(kernel, scale)
    assert_allclose(ratio, 4.0, rtol=1e-2)


@pytest.mark.parametrize("target", [0.25, 1.0, 2.0])
def test_normalize_jsa_hits_target(grid, target):
    kernel, scale = normalize_jsa(build_type0_jsa(grid, 0.5, 0.05), target)
    assert scale > 0
    assert_allclose(mean_photon_number(kernel, 1.0), target, rtol=1e-6)


def test_normalize_jsa_idempotent(jsa):
    _, scale = normalize_jsa(jsa, 1.0)
    assert_allclose(scale, 1.0, rtol=1e-9)


def test_normalize_jsa_zero_target(grid):
    kernel, scale = normalize_jsa(build_type0_jsa(grid, 0.5, 0.05), 0.0)
    assert scale == 0.0
    assert kernel.is_zero()


def test_normalize_jsa_rejects_zero_kernel(grid):
    zero = ProcessKernel(grid, grid, np.zeros((grid.n_points, grid.n_points)), KernelKind.JSA)
    with pytest.raises(ValidationError):
        normalize_jsa(zero, 1.0)


def test_photon_number_monotonic_in_scale(grid):
    kernel = build_type0_jsa(grid, 0.5, 0.05)
    _, scale = normalize_jsa(kernel, 2.0)
    values = [mean_photon_number(kernel, s) for s in np.linspace(0.0, 2 * scale, 25)]
    assert np.all(np.diff(values) > 0)


@pytest.mark.slow
def test_gain_coefficients_stable_under_refinement(grid):
    coarse, _ = normalize_jsa(build_type0_jsa(grid, 0.5, 0.05), 1.0)
    fine, _ = normalize_jsa(build_type0_jsa(grid.refined(), 0.5, 0.05), 1.0)
    assert_allclose(gain_coefficients(fine)[:5], gain_coefficients(coarse)[:5], rtol=1e-2)


# Transfer functions

def test_mqpg_tf_beamsplitter_pointwise(bins, outputs):
    tf = build_mqpg_tf(balanced_beamsplitter(), bins, outputs)
    a1, a2 = bins.sample_matrix()
    o1, o2 = outputs.sample_matrix()
    expected = (np.outer(a1 + a2, o1) + np.outer(a1 - a2, o2)) / np.sqrt(2.0)
    assert tf.kind == KernelKind.TF
    assert_allclose(tf.values, expected, atol=1e-12)


def test_mqpg_tf_identity_is_rank_one(grid, out_grid):
    bins = ModeSet.from_modes([gaussian_bin(grid, 0.5, 0.1)], (0.5,))
    outputs = ModeSet.from_modes([gaussian_bin(out_grid, 1.0, 0.1)], (1.0,))
    tf = build_mqpg_tf(NetworkUnitary(np.eye(1)), bins, outputs)
    assert_allclose(tf.values, np.outer(bins.sample_matrix()[0], outputs.sample_matrix()[0]), atol=1e-14)
    angles = schmidt_angles(tf)
    assert np.count_nonzero(angles > 1e-8 * angles[0]) == 1


def test_mqpg_tf_rank_and_input_subspace(bins, outputs):
    tf = build_mqpg_tf(balanced_beamsplitter(), bins, outputs)
    W, values, _ = np.linalg.svd(tf.operator())
    assert np.count_nonzero(values > 1e-8 * values[0]) == 2
    left = W[:, :2] @ W[:, :2].conj().T
    basis, _ = np.linalg.qr(bins.vectors().T)
    assert np.linalg.norm(left - basis @ basis.conj().T) < 1e-6


def test_mqpg_tf_rejects_overlapping_bins(grid, outputs):
    overlapping = ModeSet.from_modes([gaussian_bin(grid, 0.45, 0.1), gaussian_bin(grid, 0.55, 0.1)], (0.45, 0.55))
    with pytest.raises(ValidationError):
        build_mqpg_tf(balanced_beamsplitter(), overlapping, outputs)


def test_mqpg_tf_shape_mismatch(bins, out_grid):
    single = ModeSet.from_modes([gaussian_bin(out_grid, 1.0, 0.1)], (1.0,))
    with pytest.raises(UsageError):
        build_mqpg_tf(balanced_beamsplitter(), bins, single)


def test_unity_conversion_beamsplitter(bins, outputs):
    tf, angles = set_conversion_unity(build_mqpg_tf(balanced_beamsplitter(), bins, outputs))
    assert len(angles) == 2
    assert_allclose(angles, np.pi / 2, atol=1e-6)
    again, angles_again = set_conversion_unity(tf)
    assert_allclose(again.values, tf.values, rtol=1e-12, atol=1e-12 * np.abs(tf.values).max())
    assert_allclose(angles_again, angles, rtol=1e-12)


def test_unity_conversion_rejects_zero_tf(grid, out_grid):
    zero = ProcessKernel(grid, out_grid, np.zeros((grid.n_points, out_grid.n_points)), KernelKind.TF)
    with pytest.raises(ValidationError):
        set_conversion_unity(zero)


def test_pump_tf_approaches_separable_tf(bins):
    grid_out = make_grid(0.0, 2.0, 1501)
    distances = []
    for pm_width in (0.02, 0.005):
        pumped = pump_driven_tf(balanced_beamsplitter(), bins, grid_out, (0.5, 1.5), BinShape("gaussian", 0.1), pm_width)
        ideal = build_mqpg_tf(balanced_beamsplitter(), bins, output_peaks(grid_out, (0.5, 1.5), pm_width))
        distances.append(_relative_distance(pumped.values, ideal.values))
    assert distances[1] < distances[0]
    assert distances[1] < 0.05


def test_pump_tf_zero_pump(grid, out_grid):
    pm = PhasematchingModel("gaussian", 0.02, "horizontal", (0.5, 1.5))
    tf = build_tf_from_pump_pm(zero_function(make_grid(-1.0, 2.0, 901)), pm, grid, out_grid)
    assert tf.is_zero()


def test_pump_tf_guards(grid, out_grid):
    horizontal = PhasematchingModel("gaussian", 0.02, "horizontal", (0.5, 1.5))
    with pytest.raises(ConfigurationError):
        build_tf_from_pump_pm(constant_function(make_grid(0.0, 1.0, 301)), horizontal, grid, out_grid)
    stripe = PhasematchingModel("gaussian", 0.02, "antidiagonal", (0.5,))
    with pytest.raises(ConfigurationError):
        build_tf_from_pump_pm(constant_function(make_grid(-1.0, 2.0, 901)), stripe, grid, out_grid)
