import numpy as np
import pytest

import src.sinisterness as sinis_module
from src.bloch import decompose
from src.concurrence import concurrence
from src.errors import ChiralityUndefined, PathDisagreement, RangeError
from src.sinisterness import (
    SEPARABLE_BOUND,
    chiral_svd,
    classify_chirality,
    g_matrix,
    gamma_from_g,
    primed_frames,
    pure_overlap_symmetry,
    sinisterness,
    sinisterness_closed_form,
    sinisterness_observable,
    werner_inverse_g,
)
from src.states import (
    BELL_PHI_PLUS,
    XStateParams,
    bell_projector,
    classical_state,
    from_pure,
    local_unitary_conjugate,
    random_density,
    random_density_biased,
    random_local_unitary,
    random_pure_state,
    random_unit_vector,
    werner,
    x_state,
)

SWAP = np.eye(4)[[0, 2, 1, 3]]


def partial_transpose_first(m):
    return m.reshape(2, 2, 2, 2).transpose(2, 1, 0, 3).reshape(4, 4)


def test_g_of_bell_is_half_identity(bell):
    np.testing.assert_allclose(g_matrix(bell), np.eye(4) / 2, atol=1e-15)


@pytest.mark.parametrize("epsilon", [-1 / 3, 0.0, 0.5, 1.0])
def test_g_of_werner(epsilon):
    expected = epsilon / 2 * np.eye(4) + (1 - epsilon) / 2 * bell_projector()
    np.testing.assert_allclose(g_matrix(werner(epsilon)), expected, atol=1e-14)


def test_g_of_x_state():
    p = XStateParams(q=0.3, r=0.2, s=0.2, t=0.3, u=0.1, v=0.25)
    expected = np.array(
        [[p.q, 0, 0, p.r], [0, p.v, p.u, 0], [0, p.u, p.v, 0], [p.s, 0, 0, p.t]]
    )
    np.testing.assert_allclose(g_matrix(x_state(p)), expected, atol=1e-15)


def test_g_is_swapped_partial_transpose():
    for seed in range(20):
        rho = random_density(seed).matrix
        expected = SWAP @ partial_transpose_first(SWAP @ rho)
        np.testing.assert_allclose(g_matrix(rho), expected, atol=1e-15)


def test_trace_g_is_twice_bell_overlap():
    for seed in range(20):
        rho = random_density(seed).matrix
        assert abs(np.trace(g_matrix(rho)) - 2 * np.trace(bell_projector() @ rho)) < 1e-14


def test_gamma_from_g_matches_bloch():
    for seed in range(50):
        state = random_density(seed)
        np.testing.assert_allclose(gamma_from_g(g_matrix(state)), decompose(state).gamma, atol=1e-12)


def test_werner_inverse_g():
    for epsilon in (0.2, 0.5, 0.9):
        product = werner_inverse_g(epsilon) @ g_matrix(werner(epsilon))
        np.testing.assert_allclose(product, np.eye(4), atol=1e-12)
    with pytest.raises(RangeError):
        werner_inverse_g(0.0)


def test_bell_is_minus_one(bell):
    assert sinisterness(bell, cross_check=True) == pytest.approx(-1.0, abs=1e-12)


@pytest.mark.parametrize("epsilon", [-1 / 3, 0.0, 0.5, 1.0])
def test_werner_is_minus_epsilon_cubed(epsilon):
    state = werner(epsilon)
    assert abs(sinisterness(state) + epsilon**3) < 1e-12
    assert abs(sinisterness_observable(state) + epsilon**3) < 1e-12


def test_maximally_mixed_is_zero(maximally_mixed):
    assert sinisterness(maximally_mixed) == pytest.approx(0.0, abs=1e-15)


def test_dual_path_and_global_range():
    for seed in range(500):
        state = random_density_biased(seed, ("uniform", "toward-pure", "toward-werner")[seed % 3])
        value = sinisterness(state, cross_check=True)
        assert -1 - 1e-9 <= value <= SEPARABLE_BOUND + 1e-9


def test_dual_path_disagreement_is_reported(monkeypatch):
    monkeypatch.setattr(sinis_module, "sinisterness_observable", lambda state: 0.5)
    with pytest.raises(PathDisagreement):
        sinisterness(random_density(1), cross_check=True)


def test_chiral_svd_bell(bell):
    svd = chiral_svd(decompose(bell).c)
    np.testing.assert_allclose(svd.s, np.ones(3), atol=1e-12)
    assert svd.det_u * svd.det_v == -1
    assert svd.sinister
    assert svd.classification == "sinister"


def test_classical_state_has_undefined_chirality():
    state = classical_state([0.5, 0, 0, 0.5])
    with pytest.raises(ChiralityUndefined):
        chiral_svd(decompose(state).c)
    label, svd = classify_chirality(decompose(state).c)
    assert label == "undefined" and svd is None
    assert sinisterness(state) == pytest.approx(0.0, abs=1e-15)


def test_chiral_determinant_matches_sinisterness(entangled_full_rank):
    state = entangled_full_rank
    assert concurrence(state) > 0
    svd = chiral_svd(decompose(state).c)
    value = sinisterness(state)
    assert abs(svd.determinant() - value) <= 1e-9 * max(1.0, abs(value))
    assert np.allclose(svd.u.T @ svd.u, np.eye(3), atol=1e-10)


def test_primed_frames_diagonalize_correlations():
    data = decompose(random_density(12))
    primed = primed_frames(data)
    off_diagonal = primed.c - np.diag(np.diag(primed.c))
    assert np.max(np.abs(off_diagonal)) == 0.0
    assert np.linalg.norm(primed.a) == pytest.approx(np.linalg.norm(data.a))
    assert np.linalg.norm(primed.b) == pytest.approx(np.linalg.norm(data.b))


def test_closed_form_pure():
    assert sinisterness_closed_form("pure", BELL_PHI_PLUS) == pytest.approx(-1.0)
    for seed in range(100):
        psi = random_pure_state(seed)
        closed = sinisterness_closed_form("pure", psi)
        assert abs(closed - sinisterness(from_pure(psi))) < 1e-10


def test_closed_form_x_state_example():
    params = XStateParams(q=0.05, r=0.45, s=0.45, t=0.05, u=0.30, v=0.01)
    closed = sinisterness_closed_form("x-state", params)
    assert closed == pytest.approx(-0.28768, abs=1e-12)
    assert abs(closed - sinisterness(x_state(params))) < 1e-12


def test_closed_form_werner_and_relations():
    assert sinisterness_closed_form("werner", 1 / 3) == pytest.approx(-1 / 27)
    assert sinisterness_closed_form("classical") == 0.0
    for epsilon in np.linspace(0.35, 1.0, 14):
        conc = concurrence(werner(epsilon))
        related = sinisterness_closed_form("werner-from-concurrence", conc)
        assert abs(related - sinisterness(werner(epsilon))) < 1e-10


@pytest.mark.parametrize(
    "kind, params",
    [
        ("werner", 1.5),
        ("werner-from-concurrence", 0.0),
        ("x-state", {"q": 0.05, "r": 0.45, "s": 0.45, "t": 0.05, "u": 0.1, "v": 0.2}),
        ("qutrit", None),
    ],
)
def test_closed_form_range_errors(kind, params):
    with pytest.raises(RangeError):
        sinisterness_closed_form(kind, params)


def test_local_unitary_invariance(rng):
    for seed in range(100):
        state = random_density(seed)
        rotated = local_unitary_conjugate(state, random_local_unitary(rng), random_local_unitary(rng))
        assert abs(sinisterness(rotated) - sinisterness(state)) < 1e-9


def test_pure_overlap_symmetry(rng):
    for _ in range(100):
        psi, phi = random_unit_vector(rng, 4), random_unit_vector(rng, 4)
        left, right = pure_overlap_symmetry(psi, phi)
        assert abs(left - right) < 1e-14
