"""Tests for composition, covariance assembly, the unitary oracle and Gaussian metrics"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
from scipy.linalg import block_diag
from thewalrus.quantum import is_pure_cov, is_valid_cov
from thewalrus.symplectic import squeezing

from bogoliubov.transforms import pdc_kernels, sfg_kernels
from guardrails.exceptions import NumericalError, UsageError, ValidationError
from network.composition import CompositeAmplitudes, compose, pdc_bin_amplitudes, schmidt_output_modes
from network.covariance import (
    CovarianceMatrix,
    covariance_from_amplitudes,
    fit_tms_r,
    ideal_output_oracle,
    pdc_bin_covariance,
    symplectic_embedding,
    tms_covariance,
    vacuum_covariance,
)
from network.metrics import check_physical, mode_block, purity, squeezing_db, symplectic_form
from processes.jsa import build_type0_jsa
from processes.normalization import normalize_jsa
from processes.transfer import build_mqpg_tf, set_conversion_unity
from spectral.grid import make_grid
from spectral.modes import BinShape, ModeSet, gaussian_bin, place_bins, symmetric_bins
from spectral.pump import NetworkUnitary, balanced_beamsplitter, even_output, random_unitary


def to_xxpp(sigma: np.ndarray) -> np.ndarray:
    """Reorder (X1, Y1, X2, Y2, ...) to (X1, X2, ..., Y1, Y2, ...)"""
    order = np.concatenate([np.arange(0, sigma.shape[0], 2), np.arange(1, sigma.shape[0], 2)])
    return sigma[np.ix_(order, order)]


def pipeline_covariance(pdc, U: NetworkUnitary, bins: ModeSet, outputs: ModeSet) -> CovarianceMatrix:
    tf, _ = set_conversion_unity(build_mqpg_tf(U, bins, outputs))
    return covariance_from_amplitudes(compose(pdc, sfg_kernels(tf), outputs))


@pytest.fixture(scope="module")
def sigma_pdc(pdc, bins):
    return pdc_bin_covariance(pdc, bins)


@pytest.fixture(scope="module")
def sigma_out(pdc, bins, outputs):
    return pipeline_covariance(pdc, balanced_beamsplitter(), bins, outputs)


# Covariance container and metrics

def test_covariance_matrix_validation():
    with pytest.raises(ValidationError):
        CovarianceMatrix(np.eye(3))
    with pytest.raises(ValidationError):
        CovarianceMatrix(np.array([[1.0, 0.2], [0.0, 1.0]]))
    sigma = vacuum_covariance(2)
    assert sigma.n_modes == 2
    with pytest.raises(ValueError):
        sigma.entries[0, 0] = 1.0


def test_vacuum_metrics():
    sigma = vacuum_covariance(3)
    assert_allclose(sigma.entries, 0.5 * np.eye(6))
    assert_allclose(purity(sigma), 1.0, atol=1e-12)
    assert_allclose(squeezing_db(sigma), 0.0, atol=1e-12)
    report = check_physical(sigma)
    assert report.passed
    assert_allclose(report.symplectic_eigenvalues, 0.5)


def test_purity_thermal_mode():
    assert_allclose(purity(np.eye(2)), 0.5)


def test_squeezing_three_db_threshold():
    assert_allclose(squeezing_db(np.diag([0.25, 1.0])), 10 * np.log10(2.0))
    assert squeezing_db(np.diag([1.0, 1.0])) < 0


def test_metrics_reject_unphysical_matrices():
    with pytest.raises(NumericalError):
        purity(np.diag([1.0, -1.0]))
    with pytest.raises(NumericalError):
        squeezing_db(np.diag([1.0, -1.0]))
    symplectic, passed = check_physical(np.diag([0.4, 0.4]))
    assert not passed
    assert_allclose(symplectic, 0.4)


def test_purity_clamps_above_one(caplog):
    assert purity(np.diag([0.4, 0.5])) == 1.0
    assert "above one" in caplog.text


def test_symplectic_form_structure():
    omega = symplectic_form(3)
    assert_allclose(omega @ omega, -np.eye(6))
    assert omega[0, 1] == 1.0 and omega[1, 0] == -1.0


def test_tms_is_pure_with_half_symplectic_values():
    sigma = tms_covariance(0.7)
    report = check_physical(sigma)
    assert report.passed
    assert_allclose(report.symplectic_eigenvalues, 0.5, atol=1e-10)
    assert_allclose(purity(sigma), 1.0, atol=1e-10)
    assert is_pure_cov(to_xxpp(sigma.entries), hbar=1)
    assert_allclose(fit_tms_r(sigma), 0.7, atol=1e-12)


def test_mode_block_range():
    sigma = tms_covariance(0.3)
    assert_allclose(mode_block(sigma, 1).entries, 0.5 * np.cosh(0.6) * np.eye(2))
    with pytest.raises(UsageError):
        mode_block(sigma, 2)


# Oracle

def test_oracle_identity_keeps_covariance():
    sigma = tms_covariance(0.5)
    assert_allclose(ideal_output_oracle(NetworkUnitary(np.eye(2)), sigma).entries, sigma.entries)


def test_oracle_beamsplitter_turns_tms_into_two_sms():
    r = 0.6
    out = ideal_output_oracle(balanced_beamsplitter(), tms_covariance(r))
    expected = 0.5 * np.diag([np.exp(2 * r), np.exp(-2 * r), np.exp(-2 * r), np.exp(2 * r)])
    assert_allclose(out.entries, expected, atol=1e-12)
    assert_allclose(squeezing_db(mode_block(out, 0)), 20 * r / np.log(10), rtol=1e-12)


def test_oracle_guards():
    with pytest.raises(ValidationError):
        ideal_output_oracle(even_output(), tms_covariance(0.2))
    with pytest.raises(UsageError):
        ideal_output_oracle(random_unitary(3, seed=1), tms_covariance(0.2))


@settings(max_examples=30, deadline=None)
@given(
    st.integers(min_value=0, max_value=100_000),
    st.lists(st.floats(min_value=0.5, max_value=3.0), min_size=3, max_size=3),
    st.lists(st.floats(min_value=-1.0, max_value=1.0), min_size=3, max_size=3),
)
def test_purity_invariant_under_symplectic_maps(seed, variances, squeezings):
    thermal = CovarianceMatrix(np.diag(np.repeat(variances, 2)))
    U = random_unitary(3, seed=seed)
    S = block_diag(*[squeezing(r) for r in squeezings]) @ symplectic_embedding(U.entries)
    omega = symplectic_form(3)
    assert_allclose(S @ omega @ S.T, omega, atol=1e-10)
    moved = S @ thermal.entries @ S.T
    assert_allclose(purity(0.5 * (moved + moved.T)), purity(thermal), rtol=1e-8)
    assert_allclose(purity(ideal_output_oracle(U, thermal)), purity(thermal), rtol=1e-8)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(min_value=-1.5, max_value=1.5), min_size=2, max_size=2), st.integers(0, 10_000))
def test_pure_gaussian_states_have_unit_purity(squeezings, seed):
    S = symplectic_embedding(random_unitary(2, seed=seed).entries) @ block_diag(*[squeezing(r) for r in squeezings])
    sigma = 0.5 * S @ S.T
    sigma = 0.5 * (sigma + sigma.T)
    assert_allclose(purity(sigma), 1.0, atol=1e-8)
    assert is_pure_cov(to_xxpp(sigma), hbar=1)


# Composition

def test_vacuum_amplitudes_give_vacuum(outputs, grid):
    o = outputs.vectors()
    zeros = np.zeros((len(outputs), grid.n_points))
    amps = CompositeAmplitudes.from_vectors(o, zeros, zeros, outputs.grid, grid)
    assert_allclose(covariance_from_amplitudes(amps).entries, 0.5 * np.eye(4), atol=1e-12)
    assert_allclose(amps.commutator_norms(), 1.0, atol=1e-9)


def test_zero_gain_pipeline_is_vacuum(jsa, bins, outputs):
    sigma = pipeline_covariance(pdc_kernels(jsa, scale=0.0), balanced_beamsplitter(), bins, outputs)
    assert_allclose(sigma.entries, 0.5 * np.eye(4), atol=1e-8)
    assert_allclose(purity(sigma), 1.0, atol=1e-8)
    assert_allclose(squeezing_db(sigma), 0.0, atol=1e-7)


def test_zero_gain_has_no_conjugate_amplitude(jsa, bins, outputs):
    tf, _ = set_conversion_unity(build_mqpg_tf(balanced_beamsplitter(), bins, outputs))
    amps = compose(pdc_kernels(jsa, scale=0.0), sfg_kernels(tf), outputs)
    assert not np.any(amps.h3)


def test_composite_amplitudes_are_bosonic(pdc, bins, outputs):
    tf, _ = set_conversion_unity(build_mqpg_tf(balanced_beamsplitter(), bins, outputs))
    amps = compose(pdc, sfg_kernels(tf), outputs)
    assert amps.n_modes == 2
    assert amps.commutator_residual < 1e-6


def test_compose_rejects_mismatched_grids(pdc, bins, outputs, grid):
    tf, _ = set_conversion_unity(build_mqpg_tf(balanced_beamsplitter(), bins, outputs))
    sfg = sfg_kernels(tf)
    with pytest.raises(UsageError):
        compose(pdc, sfg, bins)
    other = pdc_kernels(normalize_jsa(build_type0_jsa(make_grid(0.0, 1.0, 201), 0.5, 0.05), 1.0)[0])
    with pytest.raises(UsageError):
        compose(other, sfg, outputs)


def test_pdc_bin_amplitudes_need_orthonormal_bins(pdc, grid):
    overlapping = ModeSet.from_modes([gaussian_bin(grid, 0.45, 0.1), gaussian_bin(grid, 0.55, 0.1)], (0.45, 0.55))
    with pytest.raises(ValidationError):
        pdc_bin_amplitudes(pdc, overlapping)


def test_pdc_bins_show_two_mode_correlations(sigma_pdc):
    entries = sigma_pdc.entries
    assert np.all(np.diag(entries) > 0.5)
    assert entries[0, 2] > 0
    assert entries[1, 3] < 0
    assert_allclose(sigma_pdc.block(0, 0)[0, 1], 0.0, atol=1e-9)
    assert check_physical(sigma_pdc).passed


def test_beamsplitter_pipeline_matches_oracle(sigma_pdc, sigma_out):
    oracle = ideal_output_oracle(balanced_beamsplitter(), sigma_pdc)
    assert_allclose(sigma_out.entries, oracle.entries, atol=1e-6)
    assert_allclose(purity(sigma_out), purity(sigma_pdc), rtol=1e-6)


def test_beamsplitter_outputs_are_independent_squeezers(sigma_out):
    assert np.max(np.abs(sigma_out.block(0, 1))) < 1e-4
    for k in range(2):
        assert squeezing_db(mode_block(sigma_out, k)) > 0
    assert check_physical(sigma_out).passed
    assert is_valid_cov(to_xxpp(sigma_out.as_array()), hbar=1)


def test_random_three_mode_network_matches_oracle(grid, out_grid, pdc):
    bins = place_bins(3, grid, 0.5, 0.08, "gaussian")
    assert bins.gram_deviation() < 1e-6
    modes = [gaussian_bin(out_grid, c, 0.1, label=f"O{m + 1}") for m, c in enumerate((0.4, 1.0, 1.6))]
    outputs = ModeSet.from_modes(modes, (0.4, 1.0, 1.6))
    U = random_unitary(3, seed=11)
    sigma = pipeline_covariance(pdc, U, bins, outputs)
    oracle = ideal_output_oracle(U, pdc_bin_covariance(pdc, bins))
    assert_allclose(sigma.entries, oracle.entries, atol=1e-6)


def test_output_mode_phase_rotates_its_block(pdc, bins, outputs, sigma_out):
    tf, _ = set_conversion_unity(build_mqpg_tf(balanced_beamsplitter(), bins, outputs))
    amps = compose(pdc, sfg_kernels(tf), outputs)
    phase = np.array([[np.exp(0.73j)], [1.0]])
    rotated = CompositeAmplitudes(amps.h1 * phase, amps.h2 * phase, amps.h3 * phase, amps.grid_out, amps.grid_in)
    sigma = covariance_from_amplitudes(rotated)
    R = symplectic_embedding(np.diag([np.exp(0.73j), 1.0]))
    assert_allclose(sigma.entries, R @ sigma_out.entries @ R.T, atol=1e-12)
    assert_allclose(sigma.block(1, 1), sigma_out.block(1, 1), atol=1e-12)
    assert_allclose(purity(sigma), purity(sigma_out), atol=1e-10)
    assert_allclose(squeezing_db(mode_block(sigma, 0)), squeezing_db(mode_block(sigma_out, 0)), atol=1e-10)


def test_network_phase_rotates_all_outputs(pdc, bins, outputs, sigma_out):
    shifted = NetworkUnitary(balanced_beamsplitter().entries * np.exp(0.73j))
    sigma = pipeline_covariance(pdc, shifted, bins, outputs)
    R = symplectic_embedding(np.exp(0.73j) * np.eye(2))
    assert_allclose(sigma.entries, R @ sigma_out.entries @ R.T, atol=1e-6)
    assert_allclose(purity(sigma), purity(sigma_out), atol=1e-10)
    assert_allclose(squeezing_db(sigma), squeezing_db(sigma_out), atol=1e-6)

def test_schmidt_output_modes_follow_reference_peaks(bins, outputs):
    tf, _ = set_conversion_unity(build_mqpg_tf(balanced_beamsplitter(), bins, outputs))
    aligned = schmidt_output_modes(tf, 2, references=outputs)
    assert aligned.centers == outputs.centers
    overlaps = np.abs(aligned.vectors().conj() @ outputs.vectors().T)
    assert_allclose(overlaps, np.eye(2), atol=1e-6)
    free = schmidt_output_modes(tf, 1)
    assert free.modes[0].label == "R1"
    with pytest.raises(UsageError):
        schmidt_output_modes(tf, 1, references=outputs)


def test_low_gain_unpaired_bins_are_near_vacuum(grid):
    jsa, _ = normalize_jsa(build_type0_jsa(grid, 0.5, 0.02), 1e-3)
    bins = symmetric_bins(grid, 0.25, 0.15, BinShape("gaussian", 0.05))
    sigma = pdc_bin_covariance(pdc_kernels(jsa), bins)
    assert_allclose(sigma.entries, 0.5 * np.eye(4), atol=1e-2)


def test_unpaired_bins_are_uncorrelated_thermal_modes(grid):
    jsa, _ = normalize_jsa(build_type0_jsa(grid, 0.5, 0.02), 2.0)
    bins = symmetric_bins(grid, 0.25, 0.15, BinShape("gaussian", 0.05))
    sigma = pdc_bin_covariance(pdc_kernels(jsa), bins)
    assert np.max(np.abs(sigma.block(0, 1))) < 1e-3
    for k in range(2):
        block = sigma.block(k, k)
        assert_allclose(block, block[0, 0] * np.eye(2), atol=1e-3)
        assert block[0, 0] > 0.5


@pytest.mark.slow
@pytest.mark.parametrize("n_points", [801, 1500])
def test_narrow_jsa_bins_form_two_mode_squeezer(n_points):
    grid = make_grid(0.0, 1.0, n_points)
    jsa, _ = normalize_jsa(build_type0_jsa(grid, 0.5, 0.005), 10.0)
    bins = symmetric_bins(grid, 0.5, 0.25, BinShape("gaussian", 0.1))
    sigma = pdc_bin_covariance(pdc_kernels(jsa), bins)
    r = fit_tms_r(sigma)
    assert r > 0
    assert_allclose(sigma.entries, tms_covariance(r).entries, atol=1e-2)
