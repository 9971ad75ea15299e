"""Random-state generators: Haar sampling, Direct blocks, the decomposition."""

import math

import numpy as np
import pytest
from scipy import stats

from entanglebench.moments import two_qubit_purity_cdf
from entanglebench.randgen import (
    DirectAngles,
    GeneratorMethod,
    KakError,
    build_direct_circuit,
    build_generator_circuit,
    exact_random_state,
    haar_unitary,
    kak_decompose,
    min_entangling_layers,
    phase_aligned_error,
    sample_direct_angles,
)
from entanglebench.simcore import (
    CNOT,
    Circuit,
    Permutation,
    Rotation,
    StateVector,
    TwoQubitUnitary,
    apply_circuit,
    circuit_unitary,
    subsystem_purity,
)

KS_ALPHA = 0.01


# ---------------------------------------------------------------------------
# Haar sampling


def test_haar_unitary_is_unitary():
    rng = np.random.default_rng(21)
    for dim in (2, 3, 4, 8):
        u = haar_unitary(dim, rng)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(dim), atol=1e-12)
    with pytest.raises(ValueError):
        haar_unitary(0, rng)


def test_haar_first_column_overlap_distribution():
    # For Haar U on dim 4, |U[0,0]|^2 follows Beta(1, 3).
    rng = np.random.default_rng(22)
    xs = np.array([abs(haar_unitary(4, rng)[0, 0]) ** 2 for _ in range(4000)])
    res = stats.kstest(xs, lambda x: 1.0 - (1.0 - x) ** 3)
    assert res.pvalue > KS_ALPHA, res


def test_haar_determinant_phase_uniform():
    # The QR phase fix must not bias the overall phase distribution.
    rng = np.random.default_rng(23)
    phases = np.array(
        [np.angle(np.linalg.det(haar_unitary(2, rng))) for _ in range(4000)]
    )
    res = stats.kstest(phases, stats.uniform(loc=-math.pi, scale=2 * math.pi).cdf)
    assert res.pvalue > KS_ALPHA, res


def test_exact_random_state_purity_mean():
    rng = np.random.default_rng(24)
    n_samples = 600
    purities = np.array(
        [
            subsystem_purity(exact_random_state(2, rng), [0])
            for _ in range(n_samples)
        ]
    )
    stderr = math.sqrt(3.0 / 175.0 / n_samples)
    assert abs(purities.mean() - 0.8) < 3 * stderr


# ---------------------------------------------------------------------------
# Direct blocks


def test_direct_angles_validation():
    with pytest.raises(ValueError):
        DirectAngles(-0.1, 0, 0, 0, 0, 0)
    with pytest.raises(ValueError):
        DirectAngles(0, 2 * math.pi, 0, 0, 0, 0)
    with pytest.raises(ValueError):
        DirectAngles(0, 0, math.pi + 0.1, 0, 0, 0)
    DirectAngles(math.pi, 0.0, 0.0, 1.0, math.pi / 2, 6.28)


def test_direct_block_layout():
    circ = build_direct_circuit(DirectAngles(0.1, 0.2, 0.3, 0.4, 0.5, 0.6))
    kinds = [type(op) for op in circ.ops]
    assert kinds == [Rotation, CNOT, Rotation, Rotation, Rotation, Rotation, Rotation]
    assert circ.ops[0] == Rotation("y", 0.1, 0)
    assert circ.ops[1] == CNOT(0, 1)
    # trailing locals: z-y-z on the control, y-z on the target
    assert [(op.axis, op.qubit) for op in circ.ops[2:]] == [
        ("z", 0),
        ("y", 0),
        ("z", 0),
        ("y", 1),
        ("z", 1),
    ]


def test_sample_direct_angles_deterministic():
    a = sample_direct_angles(np.random.default_rng(5))
    b = sample_direct_angles(np.random.default_rng(5))
    assert a == b


def test_direct_angle_marginals():
    rng = np.random.default_rng(25)
    draws = [sample_direct_angles(rng) for _ in range(4000)]
    t1 = np.array([d.theta1 for d in draws])
    t3 = np.array([d.theta3 for d in draws])
    t4 = np.array([d.theta4 for d in draws])
    # theta1: P(T <= t) = (1 - cos^3 t) / 2; theta3: (1 - cos t) / 2
    r1 = stats.kstest(t1, lambda t: 0.5 * (1.0 - np.cos(t) ** 3))
    r3 = stats.kstest(t3, lambda t: 0.5 * (1.0 - np.cos(t)))
    r4 = stats.kstest(t4, stats.uniform(loc=0.0, scale=2 * math.pi).cdf)
    for res in (r1, r3, r4):
        assert res.pvalue > KS_ALPHA, res


def test_direct_block_reduced_purity_distribution():
    # The block on |00> must reproduce the Haar reduced-purity law.
    rng = np.random.default_rng(26)
    samples = np.empty(2000)
    for i in range(len(samples)):
        circ = build_direct_circuit(sample_direct_angles(rng))
        state = apply_circuit(StateVector.zero(2), circ)
        samples[i] = subsystem_purity(state, [0])
    res = stats.kstest(samples, np.vectorize(two_qubit_purity_cdf))
    assert res.pvalue > KS_ALPHA, res


# ---------------------------------------------------------------------------
# Layered generators


def test_generator_method_validation():
    with pytest.raises(ValueError):
        GeneratorMethod("direct", 1)
    with pytest.raises(ValueError):
        GeneratorMethod("Direct", 0)
    with pytest.raises(ValueError):
        build_generator_circuit(1, GeneratorMethod("Direct", 1), np.random.default_rng(0))


def test_generator_circuit_layout():
    rng = np.random.default_rng(27)
    circ = build_generator_circuit(5, GeneratorMethod("Direct", 3), rng)
    # per layer: one permutation + two 7-op blocks on pairs (0,1) and (2,3)
    assert len(circ.ops) == 3 * (1 + 2 * 7)
    assert isinstance(circ.ops[0], Permutation)
    assert isinstance(circ.ops[15], Permutation)
    circ.validate()

    kak = build_generator_circuit(4, GeneratorMethod("KAK", 2), rng)
    blocks = [op for op in kak.ops if isinstance(op, TwoQubitUnitary)]
    assert len(blocks) == 4
    assert {b.pair for b in blocks} == {(0, 1), (2, 3)}


def test_single_layer_calls_extend_the_same_stream():
    # m calls of a 1-layer build consume the stream exactly like one m-layer
    # build; the depth sweep in experiments relies on this.
    n, m = 4, 5
    whole = build_generator_circuit(
        n, GeneratorMethod("Direct", m), np.random.default_rng(42)
    )
    rng = np.random.default_rng(42)
    stepped = StateVector.zero(n)
    for _ in range(m):
        layer = build_generator_circuit(n, GeneratorMethod("Direct", 1), rng)
        stepped = apply_circuit(stepped, layer)
    full = apply_circuit(StateVector.zero(n), whole)
    np.testing.assert_array_equal(stepped.amplitudes, full.amplitudes)


def test_min_entangling_layers():
    assert min_entangling_layers(2) == 1
    assert min_entangling_layers(4) == 3
    assert min_entangling_layers(5) == 5
    assert min_entangling_layers(6) == 5
    assert min_entangling_layers(8) == 7
    with pytest.raises(ValueError):
        min_entangling_layers(1)


# ---------------------------------------------------------------------------
# Two-qubit decomposition


def _assert_valid_decomposition(u, dec):
    for local in (dec.a1, dec.a2, dec.a3, dec.a4):
        np.testing.assert_allclose(local.conj().T @ local, np.eye(2), atol=1e-9)
    assert len([op for op in dec.circuit.ops if isinstance(op, CNOT)]) == 3
    assert len([op for op in dec.circuit.ops if isinstance(op, Rotation)]) == 15
    assert len(dec.circuit.ops) == 18
    assert phase_aligned_error(circuit_unitary(dec.circuit), u) < 1e-9


def test_decomposition_round_trip_on_haar_samples():
    rng = np.random.default_rng(28)
    for _ in range(150):
        u = haar_unitary(4, rng)
        _assert_valid_decomposition(u, kak_decompose(u))


def test_decomposition_of_structured_gates():
    cnot = circuit_unitary(Circuit(2, [CNOT(0, 1)]))
    swap = circuit_unitary(Circuit(2, [Rotation("y", 0.0, 0)]))  # identity
    rng = np.random.default_rng(29)
    cases = [
        np.eye(4, dtype=complex),
        cnot,
        swap,
        np.kron(haar_unitary(2, rng), haar_unitary(2, rng)),
        np.diag(np.exp(1j * np.array([0.3, -0.3, -0.3, 0.3]))),  # ZZ interaction
        cnot @ np.kron(haar_unitary(2, rng), np.eye(2)),
    ]
    for u in cases:
        _assert_valid_decomposition(u, kak_decompose(u))


def test_decomposition_matrix_factorization_is_exact():
    rng = np.random.default_rng(30)
    u = haar_unitary(4, rng)
    dec = kak_decompose(u)
    a, b, c = dec.cartan
    xx = np.array([[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]])
    yy = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]])
    zz = np.diag([1.0, -1.0, -1.0, 1.0])
    from scipy.linalg import expm

    canonical = expm(1j * (a * xx + b * yy + c * zz))
    rebuilt = np.kron(dec.a1, dec.a2) @ canonical @ np.kron(dec.a3, dec.a4)
    np.testing.assert_allclose(rebuilt, u, atol=1e-9)


def test_decomposition_input_validation():
    with pytest.raises(ValueError):
        kak_decompose(np.eye(3))
    with pytest.raises(ValueError):
        kak_decompose(np.ones((4, 4)))


def test_kak_error_is_a_runtime_error():
    assert issubclass(KakError, RuntimeError)
