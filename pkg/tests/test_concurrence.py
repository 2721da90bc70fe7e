import numpy as np
import pytest

from src.concurrence import (
    biorthogonal_system,
    concurrence,
    concurrence_from_r,
    concurrence_hermitian_oracle,
    r_eigenvalues,
    r_matrix,
    r_spectrum,
    spin_flip,
)
from src.errors import DegeneracyError
from src.sinisterness import pure_concurrence, werner_concurrence
from src.states import (
    XStateParams,
    bell_projector,
    from_ensemble,
    from_pure,
    local_unitary_conjugate,
    random_density,
    random_density_biased,
    random_ensemble,
    random_local_unitary,
    random_pure_state,
    werner,
    x_state,
)


def test_spin_flip_fixes_bell(bell):
    np.testing.assert_allclose(spin_flip(bell).matrix, bell.matrix, atol=1e-15)


def test_spin_flip_maps_ground_to_excited():
    flipped = spin_flip(from_pure([1, 0, 0, 0])).matrix
    np.testing.assert_allclose(flipped, np.diag([0, 0, 0, 1]), atol=1e-15)


def test_r_matrix_of_werner_is_square():
    """ρ̃_W = ρ_W, así que ℛ = ρ_W²."""
    for epsilon in (-0.2, 0.3, 0.8):
        rho = werner(epsilon).matrix
        np.testing.assert_allclose(r_matrix(werner(epsilon)), rho @ rho, atol=1e-15)


def test_pure_product_state_has_null_r():
    np.testing.assert_allclose(r_matrix(from_pure([1, 0, 0, 0])), 0, atol=1e-15)
    assert concurrence(from_pure([0, 1, 0, 0])) == 0.0


def test_reference_values(bell, maximally_mixed):
    assert concurrence(bell) == pytest.approx(1.0, abs=1e-12)
    assert concurrence(maximally_mixed) == 0.0
    params = XStateParams(q=0.05, r=0.45, s=0.45, t=0.05, u=0.30, v=0.01)
    assert concurrence(x_state(params)) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("epsilon", [-1 / 3, 0.0, 1 / 3, 0.5, 0.8, 1.0])
def test_werner_concurrence(epsilon):
    assert abs(concurrence(werner(epsilon)) - werner_concurrence(epsilon)) < 1e-12


def test_r_spectrum_of_werner_half():
    np.testing.assert_allclose(
        r_spectrum(werner(0.5)), [25 / 64, 1 / 64, 1 / 64, 1 / 64], atol=1e-13
    )


def test_quartic_spectrum_matches_reduced_form():
    for seed in range(30):
        state = random_density(seed)
        np.testing.assert_allclose(r_eigenvalues(state), r_spectrum(state), atol=1e-7)


def test_concurrence_from_r_clips_to_zero():
    assert concurrence_from_r([0.01, 0.01, 0.01, 0.01]) == 0.0
    assert concurrence_from_r([1.0, 0.0, 0.0, 0.0]) == 1.0


def test_agrees_with_hermitian_oracle():
    for seed in range(300):
        mode = ("uniform", "toward-pure", "toward-werner")[seed % 3]
        state = random_density_biased(seed, mode)
        assert abs(concurrence(state) - concurrence_hermitian_oracle(state)) < 1e-9


def test_pure_state_formula():
    for seed in range(100):
        psi = random_pure_state(seed)
        assert abs(concurrence(from_pure(psi)) - pure_concurrence(psi)) < 1e-9


@pytest.mark.parametrize("terms", [1, 2, 4, 6])
def test_separable_ensembles_have_zero_concurrence(terms):
    for seed in range(10):
        assert concurrence(from_ensemble(random_ensemble(seed, terms))) < 1e-8


def test_range_and_local_unitary_invariance(rng):
    for seed in range(100):
        state = random_density_biased(seed, "toward-pure")
        value = concurrence(state)
        assert 0.0 <= value <= 1.0
        rotated = local_unitary_conjugate(state, random_local_unitary(rng), random_local_unitary(rng))
        assert abs(concurrence(rotated) - value) < 1e-9


def test_biorthogonal_system_full_rank(entangled_full_rank):
    spectrum = biorthogonal_system(entangled_full_rank)
    assert not spectrum.degenerate
    assert spectrum.biorthogonality_residual() < 1e-7
    assert spectrum.completeness_residual() < 1e-7
    assert spectrum.rho_diagonal_residual(entangled_full_rank) < 1e-7
    rayleigh = spectrum.rayleigh_values(entangled_full_rank)
    np.testing.assert_allclose(rayleigh, spectrum.r, atol=1e-8)
    np.testing.assert_allclose(spectrum.r, r_spectrum(entangled_full_rank), atol=1e-10)


def test_biorthogonal_system_degenerate_werner():
    spectrum = biorthogonal_system(werner(0.9))
    assert spectrum.degenerate
    assert spectrum.biorthogonality_residual() < 1e-7
    np.testing.assert_allclose(spectrum.left_vectors[:, 0], spectrum.right_vectors[:, 0], atol=1e-8)
    with pytest.raises(DegeneracyError):
        biorthogonal_system(werner(0.9), allow_degenerate=False)


def test_werner_witness_is_bell_reflection():
    witness = biorthogonal_system(werner(0.8)).witness()
    np.testing.assert_allclose(witness, 2 * bell_projector() - np.eye(4), atol=1e-8)


def test_rank_deficient_state_raises(bell):
    with pytest.raises(DegeneracyError):
        biorthogonal_system(bell)


def test_quartic_report_of_bell_is_exact(bell):
    np.testing.assert_allclose(r_eigenvalues(bell), [1.0, 0.0, 0.0, 0.0], atol=1e-12)


def test_quartic_report_is_nonnegative_on_degenerate_spectra():
    np.testing.assert_allclose(
        r_eigenvalues(werner(0.2)), [0.16, 0.04, 0.04, 0.04], atol=1e-12
    )
    for seed in range(200):
        r = r_eigenvalues(from_pure(random_pure_state(seed)))
        assert np.all(r >= 0.0)
        np.testing.assert_allclose(r[1:], 0.0, atol=1e-12)


def test_quartic_concurrence_matches_oracle_on_separated_spectra():
    checked = 0
    for seed in range(100):
        state = random_density(seed)
        reference = r_spectrum(state)
        if np.min(-np.diff(reference)) <= 1e-4 * reference[0]:
            continue
        quartic = concurrence_from_r(r_eigenvalues(state))
        assert abs(quartic - concurrence_hermitian_oracle(state)) < 1e-8
        checked += 1
    assert checked > 90
