import numpy as np
import pytest

from src.bloch import decompose
from src.callbacks import ProgressCallback
from src.errors import ConstraintError
from src.experiments import (
    MODE_PRESETS,
    envelope_flags,
    estimator_convergence,
    expected_correlations,
    resolve_modes,
    scan_random_states,
    simulate_measurements,
    summarize_scan,
)
from src.states import SamplingMode, derive_seeds, random_density, werner


def test_single_record_scan():
    records = scan_random_states(1, seed=3)
    assert len(records) == 1
    assert records[0].seed == derive_seeds(3, 1)[0]
    assert records[0].mode is SamplingMode.TOWARD_PURE


def test_scan_is_deterministic_and_sorted():
    first = scan_random_states(30, seed=11, mode_mix="mixed")
    second = scan_random_states(30, seed=11, mode_mix="mixed")
    assert [r.model_dump() for r in first] == [r.model_dump() for r in second]
    seeds = [r.seed for r in first]
    assert seeds == sorted(seeds)
    assert {r.mode for r in first} == set(MODE_PRESETS["mixed"])


def test_parallel_scan_matches_serial():
    serial = scan_random_states(24, seed=5, workers=1)
    parallel = scan_random_states(24, seed=5, workers=2)
    assert [r.model_dump() for r in serial] == [r.model_dump() for r in parallel]


def test_parallel_scan_reports_progress_per_chunk():
    callback = ProgressCallback("parallel-scan", progress_every=5)
    scan_random_states(10, seed=1, workers=2, callback=callback)
    assert [e["done"] for e in callback.events_named("scan_progress")] == [6, 10]


def test_envelope_holds_on_small_scan():
    records = scan_random_states(200, seed=2024)
    assert not any(r.violation for r in records)
    for r in records:
        assert 0.0 <= r.concurrence <= 1.0
        assert -1.0 - 1e-9 <= r.sinisterness <= 1 / 27 + 1e-9


def test_separable_fraction_band():
    records = scan_random_states(1000, seed=7)
    summary = summarize_scan(records, 7, resolve_modes("biased"))
    assert 0.05 <= summary.separable_fraction <= 0.40
    assert summary.total_violations == 0
    assert summary.n == 1000
    assert summary.modes == ["toward-pure", "toward-werner"]


def test_uniform_scan_separable_band():
    records = scan_random_states(3000, seed=7, mode_mix="uniform")
    summary = summarize_scan(records, 7, resolve_modes("uniform"))
    assert 0.05 <= summary.separable_fraction <= 0.40
    assert summary.total_violations == 0
    assert summary.modes == ["uniform"]


def test_scan_rejects_bad_arguments():
    with pytest.raises(ValueError):
        scan_random_states(0, seed=1)
    with pytest.raises(ValueError):
        scan_random_states(5, seed=1, mode_mix="toward-nowhere")
    with pytest.raises(ValueError):
        resolve_modes([])


@pytest.mark.parametrize(
    "conc, sinis, expected",
    [
        (0.0, 0.0, (True, False, False, False)),
        (0.0, 0.05, (True, False, False, True)),
        (0.0, -0.05, (True, False, False, True)),
        (1.0, -1.0, (False, False, False, False)),
        (0.5, 0.0, (False, True, False, False)),
        (0.5, -0.9, (False, False, True, False)),
    ],
)
def test_envelope_flags(conc, sinis, expected):
    assert envelope_flags(conc, sinis) == expected


def test_scan_emits_progress_events():
    callback = ProgressCallback("test-scan", progress_every=5)
    scan_random_states(10, seed=1, callback=callback)
    assert len(callback.events_named("scan_start")) == 1
    assert [e["done"] for e in callback.events_named("scan_progress")] == [5, 10]
    assert callback.events_named("violation") == []
    finish = callback.events_named("scan_finish")[0]
    assert finish["violations"] == 0


def test_single_shot_has_no_covariance(bell):
    estimate = simulate_measurements(bell, shots=1, seed=0)
    np.testing.assert_array_equal(estimate.c_hat, np.zeros((3, 3)))
    assert estimate.sinisterness_hat == 0.0


def test_bell_estimate_with_many_shots(bell):
    estimate = simulate_measurements(bell, shots=1_000_000, seed=42)
    assert abs(estimate.sinisterness_hat + 1.0) < 0.02
    assert estimate.sinisterness_exact == pytest.approx(-1.0)


def test_maximally_mixed_estimate(maximally_mixed):
    estimate = simulate_measurements(maximally_mixed, shots=10_000, seed=42)
    assert abs(estimate.sinisterness_hat) < 0.05
    assert estimate.standard_error >= 0.0


def test_simulation_is_seeded(bell):
    a = simulate_measurements(bell, shots=500, seed=9).to_json_dict()
    b = simulate_measurements(bell, shots=500, seed=9).to_json_dict()
    assert a == b
    with pytest.raises(ValueError):
        simulate_measurements(bell, shots=0, seed=9)


def test_expected_correlations_reproduce_bloch():
    for seed in range(20):
        state = random_density(seed)
        estimate = expected_correlations(state)
        data = decompose(state)
        np.testing.assert_allclose(estimate.c_hat, data.c, atol=1e-12)
        np.testing.assert_allclose(estimate.a_hat, data.a, atol=1e-12)
        np.testing.assert_allclose(estimate.b_hat, data.b, atol=1e-12)
        assert estimate.standard_error == 0.0
        assert abs(estimate.sinisterness_hat - estimate.sinisterness_exact) < 1e-12


def test_convergence_single_rung(bell):
    table = estimator_convergence(bell, [1000], repeats=5, seed=1)
    assert len(table.rows) == 1
    assert table.slope is None
    assert table.exact == pytest.approx(-1.0)


def test_convergence_rejects_bad_ladder(bell):
    with pytest.raises(ConstraintError):
        estimator_convergence(bell, [1000, 100], repeats=5, seed=1)
    with pytest.raises(ConstraintError):
        estimator_convergence(bell, [], repeats=5, seed=1)
    with pytest.raises(ValueError):
        estimator_convergence(bell, [100], repeats=0, seed=1)


def test_werner_error_scales_as_inverse_root():
    table = estimator_convergence(werner(0.8), [200, 2000, 20000], repeats=40, seed=3)
    assert -0.65 <= table.slope <= -0.35
    errors = [row.rms_error for row in table.rows]
    assert errors[0] > errors[-1]


def test_bell_error_decays_at_least_as_inverse_root(bell):
    table = estimator_convergence(bell, [200, 2000, 20000], repeats=40, seed=3)
    assert table.slope <= -0.35


@pytest.mark.slow
def test_envelope_holds_at_full_scale():
    records = scan_random_states(100_000, seed=20240917, workers=4)
    summary = summarize_scan(records, 20240917, resolve_modes("biased"))
    assert summary.total_violations == 0
    assert 0.05 <= summary.separable_fraction <= 0.40


@pytest.mark.slow
def test_random_state_estimator_slopes():
    for seed in range(10):
        state = random_density(seed)
        table = estimator_convergence(state, [10_000, 100_000, 1_000_000], repeats=40, seed=seed)
        assert -0.65 <= table.slope <= -0.35


@pytest.mark.slow
def test_uniform_envelope_at_full_scale():
    records = scan_random_states(100_000, seed=20240917, mode_mix="uniform", workers=4)
    summary = summarize_scan(records, 20240917, resolve_modes("uniform"))
    assert summary.total_violations == 0
    assert 0.05 <= summary.separable_fraction <= 0.40
