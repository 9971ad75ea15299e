"""Randomized-measurement purity estimation: statistics and bookkeeping."""

import math

import numpy as np
import pytest

from entanglebench.randmeas import (
    MeasurementSetting,
    ShotRecord,
    draw_settings,
    estimate_purity,
    marginal_counts,
    purity_from_counts,
    purity_from_probabilities,
    read_records,
    setting_probabilities,
    simulate_randomized_measurements,
    write_records,
)
from entanglebench.simcore import (
    CNOT,
    Circuit,
    DensityMatrix,
    Rotation,
    StateVector,
    apply_circuit,
    partial_trace,
    subsystem_purity,
)


def _bell_state():
    return apply_circuit(
        StateVector.zero(2), Circuit(2, [Rotation("y", math.pi / 2, 0), CNOT(0, 1)])
    )


def test_maximally_mixed_statistic_is_exact():
    # Every setting evaluates to exactly 2^-k on the maximally mixed state.
    rng = np.random.default_rng(41)
    rho = DensityMatrix(1, np.eye(2) / 2)
    for setting in draw_settings(1, 5, rng):
        probs = setting_probabilities(rho, setting)
        assert purity_from_probabilities(probs) == pytest.approx(0.5, abs=1e-12)


def test_probability_statistic_haar_average_is_purity():
    # Averaged over Haar settings, X on exact probabilities estimates Tr rho^2.
    rng = np.random.default_rng(42)
    state = _bell_state()
    rho = partial_trace(DensityMatrix.from_state(state), [0])
    xs = [
        purity_from_probabilities(setting_probabilities(rho, s))
        for s in draw_settings(1, 3000, rng)
    ]
    assert np.mean(xs) == pytest.approx(0.5, abs=3 * np.std(xs) / math.sqrt(len(xs)))


def test_unbiased_estimator_beats_biased_at_small_shots():
    rng = np.random.default_rng(43)
    state = StateVector.zero(1)  # purity exactly 1
    settings = draw_settings(1, 400, rng)
    records = simulate_randomized_measurements(state, settings, 5, rng)
    est_u, err_u = estimate_purity(records, [0], unbiased=True)
    est_b, err_b = estimate_purity(records, [0], unbiased=False)
    assert abs(est_u - 1.0) < 3 * err_u
    # the biased variant overshoots by about 2^k / N_s = 0.4 here
    assert est_b - 1.0 > 3 * err_b


def test_more_settings_shrink_the_standard_error():
    rng = np.random.default_rng(44)
    state = _bell_state()
    few = simulate_randomized_measurements(
        state, draw_settings(2, 20, rng), 400, rng
    )
    many = simulate_randomized_measurements(
        state, draw_settings(2, 200, rng), 400, rng
    )
    _, err_few = estimate_purity(few, [0, 1])
    _, err_many = estimate_purity(many, [0, 1])
    assert err_many < err_few


def test_estimates_recover_bell_subsystem_purities():
    rng = np.random.default_rng(45)
    state = _bell_state()
    records = simulate_randomized_measurements(
        state, draw_settings(2, 60, rng), 2000, rng
    )
    for keep, exact in (([0], 0.5), ([1], 0.5), ([0, 1], 1.0)):
        est, err = estimate_purity(records, keep)
        assert abs(est - exact) < max(3 * err, 0.05), (keep, est, err)


def test_simulation_is_deterministic():
    state = _bell_state()
    a = simulate_randomized_measurements(
        state, draw_settings(2, 4, np.random.default_rng(9)), 100,
        np.random.default_rng(10),
    )
    b = simulate_randomized_measurements(
        state, draw_settings(2, 4, np.random.default_rng(9)), 100,
        np.random.default_rng(10),
    )
    assert a == b


def test_setting_qubit_count_must_match_state():
    rng = np.random.default_rng(46)
    with pytest.raises(ValueError):
        simulate_randomized_measurements(
            _bell_state(), draw_settings(1, 2, rng), 10, rng
        )


def test_partial_setting_probabilities_match_reduced_state():
    # A setting on the leading qubits: marginalizing the full distribution
    # equals measuring the reduced density matrix directly.
    rng = np.random.default_rng(47)
    amps = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    state = StateVector(3, amps / np.linalg.norm(amps))
    (setting,) = draw_settings(2, 2, rng)[:1]
    full = setting_probabilities(state, setting)
    marg = full.reshape(4, 2).sum(axis=1)
    reduced = partial_trace(DensityMatrix.from_state(state), [0, 1])
    np.testing.assert_allclose(
        marg, setting_probabilities(reduced, setting), atol=1e-10
    )


def test_marginal_counts_hand_case():
    record = ShotRecord(0, 6, {"00": 3, "01": 2, "10": 1})
    assert marginal_counts(record, [0]) == {"0": 5, "1": 1}
    assert marginal_counts(record, [1]) == {"0": 4, "1": 2}
    assert marginal_counts(record, [0, 1]) == record.counts
    with pytest.raises(ValueError):
        marginal_counts(record, [2])
    with pytest.raises(ValueError):
        marginal_counts(record, [])


def test_purity_from_counts_hand_case():
    # all 4 shots on "0": quad = 16, unbiased 2*(16-4)/(4*3) = 2 (a single
    # setting's statistic tops out at 2^k; only the setting average is the
    # purity)
    assert purity_from_counts({"0": 4}) == pytest.approx(2.0)
    # an even split: quad = (c W c) = 4 + 4 - 8*0.5 = 4, N = 4
    # unbiased: 2 * (4 - 4) / 12 = 0; biased: 2 * 4 / 16 = 0.5
    assert purity_from_counts({"0": 2, "1": 2}) == pytest.approx(0.0)
    assert purity_from_counts({"0": 2, "1": 2}, unbiased=False) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        purity_from_counts({"0": 1})


def test_shot_record_validation():
    ShotRecord(0, 3, {"01": 2, "10": 1})
    with pytest.raises(ValueError):
        ShotRecord(-1, 3, {"01": 3})
    with pytest.raises(ValueError):
        ShotRecord(0, 0, {})
    with pytest.raises(ValueError):
        ShotRecord(0, 3, {"01": 2, "1": 1})  # ragged bitstrings
    with pytest.raises(ValueError):
        ShotRecord(0, 3, {"02": 3})  # non-binary character
    with pytest.raises(ValueError):
        ShotRecord(0, 3, {"01": -1, "10": 4})
    with pytest.raises(ValueError):
        ShotRecord(0, 3, {"01": 5})  # counts exceed n_shots


def test_measurement_setting_validation():
    with pytest.raises(ValueError):
        MeasurementSetting((np.ones((2, 2)),))
    setting = MeasurementSetting((np.eye(2), np.eye(2)))
    assert setting.n_qubits == 2


def test_estimate_needs_two_records():
    record = ShotRecord(0, 4, {"0": 4})
    with pytest.raises(ValueError):
        estimate_purity([record], [0])


def test_records_json_round_trip(tmp_path):
    rng = np.random.default_rng(48)
    records = simulate_randomized_measurements(
        _bell_state(), draw_settings(2, 3, rng), 50, rng
    )
    path = tmp_path / "records.jsonl"
    write_records(records, path)
    assert read_records(path) == records
    # one JSON document per line
    lines = path.read_text().strip().split("\n")
    assert len(lines) == 3
