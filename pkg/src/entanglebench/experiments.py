"""Experiment drivers shared by the command-line tool and the test suite.

Each ``run_*`` function performs one full study and returns plain row tuples
in the order the CSV reports expect.  All randomness comes in through a
single ``numpy.random.Generator``; ensembles split it with ``spawn`` so the
runs are reproducible and order-independent.
"""

from __future__ import annotations

import numpy as np

from .hardware import (
    CouplingGraph,
    NoiseModel,
    cnot_count,
    evolution_study,
    hardware_benchmark,
)
from .moments import (
    BipartitionDims,
    EnsembleReport,
    exact_mean_purity,
    exact_variance_purity,
    relative_errors,
)
from .randgen import (
    GeneratorMethod,
    phase_aligned_error,
    build_generator_circuit,
    haar_unitary,
    kak_decompose,
)
from .randmeas import draw_settings, estimate_purity, simulate_randomized_measurements
from .simcore import Rotation, StateVector, apply_circuit, circuit_unitary, subsystem_purity


def purity_sample_trajectories(
    n_qubits: int,
    method: str,
    max_layers: int,
    n_ensemble: int,
    rng: np.random.Generator,
) -> dict[int, dict[int, np.ndarray]]:
    """Subsystem purities of every ensemble member after each layer.

    Returns ``{m: {n_a: samples}}`` for m = 1..max_layers and
    n_a = 1..n-1, where ``samples`` holds one purity per member.  Layer m
    extends the same member state that produced layer m-1, so a full depth
    sweep costs a single max_layers-deep ensemble: one generator layer drawn
    from a stream is identical to the next layer of a deeper circuit drawn
    from that stream.
    """
    if max_layers < 1:
        raise ValueError(f"max_layers must be >= 1, got {max_layers}")
    sizes = range(1, n_qubits)
    samples = {
        m: {k: np.empty(n_ensemble) for k in sizes}
        for m in range(1, max_layers + 1)
    }
    one_layer = GeneratorMethod(method, 1)
    for i, member_rng in enumerate(rng.spawn(n_ensemble)):
        state = StateVector.zero(n_qubits)
        for m in range(1, max_layers + 1):
            layer = build_generator_circuit(n_qubits, one_layer, member_rng)
            state = apply_circuit(state, layer)
            for k in sizes:
                samples[m][k][i] = subsystem_purity(state, range(k))
    return samples


def bootstrap_relative_error(
    samples: dict[int, np.ndarray],
    n_qubits: int,
    n_resamples: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Bootstrap replicates of the n_a-averaged mean relative error.

    ``samples`` maps n_a to per-member purities at one fixed depth.  Members
    are resampled with replacement and the |sample mean - exact| / exact
    statistic, averaged over n_a, is recomputed per replicate.
    """
    sizes = sorted(samples)
    n_members = len(samples[sizes[0]])
    exact = {
        k: float(exact_mean_purity(BipartitionDims.from_qubits(n_qubits, k)))
        for k in sizes
    }
    replicates = np.empty(n_resamples)
    for b in range(n_resamples):
        idx = rng.integers(0, n_members, size=n_members)
        errs = [
            abs(float(np.mean(samples[k][idx])) - exact[k]) / exact[k]
            for k in sizes
        ]
        replicates[b] = np.mean(errs)
    return replicates


def run_convergence(
    n_qubits: int,
    methods: tuple[str, ...],
    max_layers: int,
    n_ensemble: int,
    seed: int | None,
    rng: np.random.Generator,
) -> list[tuple[str, int, int, float, float]]:
    """Averaged relative errors of ensemble purity statistics per depth.

    Rows are (method, m, N_e, delta_mu, delta_sigma2): the mean and variance
    relative errors against the exact random-state values, averaged over
    n_a, after m generator layers.
    """
    rows = []
    for method in methods:
        samples = purity_sample_trajectories(
            n_qubits, method, max_layers, n_ensemble, rng
        )
        for m in range(1, max_layers + 1):
            report = EnsembleReport.from_samples(
                n_qubits, method, m, seed, samples[m]
            )
            delta_mu, delta_var = relative_errors(report)
            rows.append((method, m, n_ensemble, delta_mu, delta_var))
    return rows


def run_moments_table(n_qubits: int) -> list[tuple[int, int, str, str]]:
    """Exact purity mean/variance per bipartition, as fraction strings."""
    rows = []
    for k in range(1, n_qubits):
        dims = BipartitionDims.from_qubits(n_qubits, k)
        rows.append(
            (
                n_qubits,
                k,
                str(exact_mean_purity(dims)),
                str(exact_variance_purity(dims)),
            )
        )
    return rows


def run_estimate(
    n_qubits: int,
    method: str,
    layers: int,
    n_settings: int,
    n_shots: int,
    rng: np.random.Generator,
) -> list[tuple[int, int, float, float, float]]:
    """Randomized-measurement purity estimates on one exact generated state.

    Rows are (n, n_a, purity_est, std_err, purity_exact) for every leading
    subsystem; n_a = n measures the whole register.
    """
    circuit = build_generator_circuit(n_qubits, GeneratorMethod(method, layers), rng)
    state = apply_circuit(StateVector.zero(n_qubits), circuit)
    settings = draw_settings(n_qubits, n_settings, rng)
    records = simulate_randomized_measurements(state, settings, n_shots, rng)
    rows = []
    for k in range(1, n_qubits + 1):
        est, err = estimate_purity(records, range(k))
        rows.append((n_qubits, k, est, err, subsystem_purity(state, range(k))))
    return rows


def run_emulate(
    n_qubits: int,
    method: str,
    graph: CouplingGraph,
    noise: NoiseModel,
    n_ensemble: int,
    n_settings: int,
    n_shots: int,
    rng: np.random.Generator,
) -> list[tuple[int, int, float, float, float]]:
    """Noisy-device purity benchmark rows (n, n_a, est, std_err, exact)."""
    table = hardware_benchmark(
        n_qubits,
        method,
        graph,
        noise,
        rng,
        n_ensemble=n_ensemble,
        n_settings=n_settings,
        n_shots=n_shots,
    )
    return [
        (n_qubits, k, est, err, exact)
        for k, (est, err, exact) in sorted(table.items())
    ]


def run_evolution(
    n_qubits: int,
    method: str,
    graph: CouplingGraph,
    noise: NoiseModel,
    max_steps: int,
    rng: np.random.Generator,
) -> list[tuple[int, int, float]]:
    """Exact purity after each iterated schedule step: (step, n_a, purity)."""
    return evolution_study(n_qubits, method, graph, noise, max_steps, rng)


def run_kak_verify(
    n_samples: int, rng: np.random.Generator
) -> list[tuple[int, float, int, int]]:
    """Decompose random 4x4 unitaries and report round-trip quality.

    Rows are (index, reconstruction_error, cnot_count, rotation_count); the
    error is the max-abs deviation of the rebuilt circuit unitary from the
    input, up to global phase.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    rows = []
    for i in range(n_samples):
        u = haar_unitary(4, rng)
        dec = kak_decompose(u)
        err = phase_aligned_error(circuit_unitary(dec.circuit), u)
        rotations = sum(1 for op in dec.circuit.ops if isinstance(op, Rotation))
        rows.append((i, err, cnot_count(dec.circuit), rotations))
    return rows
