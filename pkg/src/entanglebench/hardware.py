"""Hardware emulation: coupling graphs, routing, noise channels, benchmarks.

The emulation answers one question: how do qubit connectivity and gate
errors distort the purity statistics of pseudo-random states?  It combines

* :class:`CouplingGraph` presets for the studied devices (a 7-qubit
  fixed-coupling superconducting layout and an all-to-all trapped-ion one),
* SWAP routing with explicit 3-CNOT expansion and CNOT accounting,
* depolarizing noise after every gate plus readout bit-flips (SPAM), with
  probabilities derived from published average gate fidelities, and
* the fixed two-qubit pair schedules used for the 4- and 6-qubit benchmarks.

Noisy evolution works on density matrices; the randomized-measurement
pipeline then runs on the noisy state exactly as it would on hardware.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .randgen import GeneratorMethod, haar_unitary, kak_decompose, sample_direct_angles
from .randmeas import (
    _sample_counts,
    draw_settings,
    estimate_purity,
    setting_probabilities,
    ShotRecord,
)
from .simcore import (
    CNOT,
    Circuit,
    DensityMatrix,
    GateOp,
    Permutation,
    Rotation,
    SWAP,
    TwoQubitUnitary,
    _apply_op_mixed,
    op_qubits,
    partial_trace,
    purity,
)
from .randgen import _direct_block_ops

__all__ = [
    "CouplingGraph",
    "NoiseModel",
    "PAIR_SCHEDULES",
    "preset_graph",
    "noise_preset",
    "build_schedule_circuit",
    "route_circuit",
    "cnot_count",
    "apply_noisy_circuit",
    "noisy_measure",
    "hardware_benchmark",
    "evolution_study",
]


@dataclass(frozen=True)
class CouplingGraph:
    """Undirected connectivity graph; two-qubit gates need an edge."""

    n_qubits: int
    edges: frozenset

    def __init__(self, n_qubits: int, edges: Iterable[tuple[int, int]]) -> None:
        if n_qubits < 1:
            raise ValueError("graph needs at least one qubit")
        normalized = set()
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop on qubit {a}")
            if not (0 <= a < n_qubits and 0 <= b < n_qubits):
                raise ValueError(f"edge ({a}, {b}) out of range")
            normalized.add((min(a, b), max(a, b)))
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "edges", frozenset(normalized))
        if n_qubits > 1:
            seen = {0}
            frontier = [0]
            while frontier:
                q = frontier.pop()
                for nb in self.neighbors(q):
                    if nb not in seen:
                        seen.add(nb)
                        frontier.append(nb)
            if len(seen) != n_qubits:
                raise ValueError("coupling graph is not connected")

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def neighbors(self, q: int) -> list[int]:
        return sorted(b if a == q else a for a, b in self.edges if q in (a, b))

    def shortest_path(self, a: int, b: int) -> list[int]:
        """BFS shortest path; ties broken toward lower qubit indices."""
        if a == b:
            return [a]
        parent = {a: -1}
        frontier = [a]
        while frontier:
            nxt = []
            for u in frontier:
                for v in self.neighbors(u):
                    if v not in parent:
                        parent[v] = u
                        if v == b:
                            path = [b]
                            while path[-1] != a:
                                path.append(parent[path[-1]])
                            return path[::-1]
                        nxt.append(v)
            frontier = sorted(nxt)
        raise ValueError(f"no path between {a} and {b}")


_LAGOS7_EDGES = ((0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6))


def preset_graph(name: str) -> CouplingGraph:
    """Named coupling graphs: all_to_all:n, line:n, lagos7, harmony11."""
    if name == "lagos7":
        return CouplingGraph(7, _LAGOS7_EDGES)
    if name == "harmony11":
        return preset_graph("all_to_all:11")
    kind, sep, arg = name.partition(":")
    if sep and arg.isdigit():
        n = int(arg)
        if kind == "all_to_all":
            return CouplingGraph(n, [(a, b) for a in range(n) for b in range(a + 1, n)])
        if kind == "line":
            return CouplingGraph(n, [(q, q + 1) for q in range(n - 1)])
    raise ValueError(f"unknown coupling graph {name!r}")


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing probabilities per gate arity plus readout flip rate."""

    p1: float
    p2: float
    p_spam: float

    def __post_init__(self) -> None:
        for name in ("p1", "p2", "p_spam"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    @classmethod
    def from_fidelities(cls, f1: float, f2: float, f_spam: float) -> "NoiseModel":
        """Convert average gate fidelities to depolarizing probabilities.

        Uses p = d^2/(d^2-1) * (1 - F) with d = 2 for one-qubit and d = 4
        for two-qubit gates; SPAM infidelity maps directly to a per-qubit
        readout bit-flip probability.
        """
        return cls(
            p1=(4.0 / 3.0) * (1.0 - f1),
            p2=(16.0 / 15.0) * (1.0 - f2),
            p_spam=1.0 - f_spam,
        )

    @property
    def is_noiseless(self) -> bool:
        return self.p1 == self.p2 == self.p_spam == 0.0


_NOISE_PRESETS = {
    # published average fidelities: (1Q, 2Q, SPAM)
    "lagos": (0.9998, 0.9924, 0.9862),
    "harmony": (0.9972, 0.96541, 0.99709),
}


def noise_preset(name: str) -> NoiseModel:
    """Named noise models: lagos, harmony, noiseless."""
    if name == "noiseless":
        return NoiseModel(0.0, 0.0, 0.0)
    if name in _NOISE_PRESETS:
        return NoiseModel.from_fidelities(*_NOISE_PRESETS[name])
    raise ValueError(f"unknown noise preset {name!r}")


# Fixed benchmark pair schedules (one application is one "step").
PAIR_SCHEDULES = {
    4: ((0, 1), (2, 3), (0, 2), (1, 3)),
    6: ((0, 1), (2, 3), (4, 5), (1, 2), (3, 4), (0, 5), (0, 3), (1, 4), (5, 2)),
}


def build_schedule_circuit(
    n_qubits: int, method: str, rng: np.random.Generator
) -> Circuit:
    """One pass of the fixed pair schedule with fresh random blocks.

    ``method="Direct"`` inserts the 1-CNOT Direct block on each scheduled
    pair; ``method="KAK"`` draws a Haar 4x4 unitary and inlines its compiled
    3-CNOT circuit.  No permutation ops are used (hardware schedules avoid
    them), so the circuit routes directly.
    """
    if n_qubits not in PAIR_SCHEDULES:
        raise ValueError(
            f"no pair schedule for n={n_qubits}; presets exist for "
            f"{sorted(PAIR_SCHEDULES)}"
        )
    GeneratorMethod(method, 1)  # validates the tag
    ops: list[GateOp] = []
    for pair in PAIR_SCHEDULES[n_qubits]:
        if method == "Direct":
            ops.extend(_direct_block_ops(sample_direct_angles(rng), *pair))
        else:
            block = kak_decompose(haar_unitary(4, rng)).circuit
            ops.extend(_remap_op(op, pair) for op in block.ops)
    return Circuit(n_qubits, ops)


def _remap_op(op: GateOp, pair: tuple[int, int]) -> GateOp:
    if isinstance(op, Rotation):
        return Rotation(op.axis, op.angle, pair[op.qubit])
    if isinstance(op, CNOT):
        return CNOT(pair[op.control], pair[op.target])
    raise TypeError(f"cannot remap op {op!r}")


def route_circuit(circuit: Circuit, graph: CouplingGraph) -> Circuit:
    """Insert SWAP chains (as 3 CNOTs each) so 2-qubit ops act on edges.

    Logical wires start on the identically numbered physical qubits; a
    trailing Permutation op restores the logical labeling, so noiseless
    routed and unrouted executions agree exactly.  Circuits already
    compatible with the graph are returned unchanged.
    """
    circuit.validate()
    if circuit.n_qubits > graph.n_qubits:
        raise ValueError(
            f"circuit needs {circuit.n_qubits} qubits, graph has {graph.n_qubits}"
        )
    n_phys = graph.n_qubits
    where = list(range(n_phys))  # virtual wire -> physical qubit
    occupant = list(range(n_phys))  # physical qubit -> virtual wire
    ops: list[GateOp] = []
    swapped = False
    for op in circuit.ops:
        if isinstance(op, Permutation):
            raise ValueError("route_circuit does not accept Permutation ops")
        if isinstance(op, Rotation):
            ops.append(Rotation(op.axis, op.angle, where[op.qubit]))
            continue
        a, b = op_qubits(op)
        if not graph.has_edge(where[a], where[b]):
            swapped = True
            path = graph.shortest_path(where[a], where[b])
            for x, y in zip(path[:-2], path[1:-1]):
                ops.extend((CNOT(x, y), CNOT(y, x), CNOT(x, y)))
                vx, vy = occupant[x], occupant[y]
                occupant[x], occupant[y] = vy, vx
                where[vx], where[vy] = y, x
        if isinstance(op, CNOT):
            ops.append(CNOT(where[op.control], where[op.target]))
        elif isinstance(op, SWAP):
            ops.append(SWAP(where[op.a], where[op.b]))
        else:
            ops.append(TwoQubitUnitary(op.matrix, (where[a], where[b])))
    if not swapped and circuit.n_qubits == n_phys:
        return circuit
    if occupant != list(range(n_phys)):
        ops.append(Permutation(tuple(occupant)))
    return Circuit(n_phys, ops)


def cnot_count(circuit: Circuit) -> int:
    """CNOT cost: CNOT=1, SWAP=3, generic two-qubit unitary=3, rest free."""
    total = 0
    for op in circuit.ops:
        if isinstance(op, CNOT):
            total += 1
        elif isinstance(op, (SWAP, TwoQubitUnitary)):
            total += 3
    return total


def _depolarize(mat: np.ndarray, n: int, qubits: tuple[int, ...], p: float) -> np.ndarray:
    """Partially depolarize: rho -> (1-p) rho + p * Tr_qubits(rho) x I/d."""
    if p == 0.0:
        return mat
    hit = sorted(qubits)
    kept = [q for q in range(n) if q not in hit]
    da, db = 1 << len(kept), 1 << len(hit)
    order = kept + hit + [n + q for q in kept] + [n + q for q in hit]
    moved = mat.reshape([2] * (2 * n)).transpose(order).reshape(da, db, da, db)
    traced = np.trace(moved, axis1=1, axis2=3)
    mixed = np.einsum("ac,bd->abcd", traced, np.eye(db) / db)
    back = mixed.reshape([2] * (2 * n)).transpose(np.argsort(order))
    return (1.0 - p) * mat + p * back.reshape(mat.shape)


def apply_noisy_circuit(
    rho: DensityMatrix, circuit: Circuit, noise: NoiseModel
) -> DensityMatrix:
    """Evolve a density matrix with depolarizing noise after every gate.

    Single-qubit rotations are followed by p1 depolarizing on their target,
    every two-qubit op by p2 depolarizing on its pair; Permutation ops are
    relabelings and carry no noise.
    """
    rho.validate()
    circuit.validate()
    if circuit.n_qubits != rho.n_qubits:
        raise ValueError(
            f"circuit is on {circuit.n_qubits} qubits, state on {rho.n_qubits}"
        )
    n = rho.n_qubits
    mat = np.array(rho.matrix, dtype=np.complex128, copy=True)
    for op in circuit.ops:
        mat = _apply_op_mixed(mat, n, op)
        if isinstance(op, Rotation):
            mat = _depolarize(mat, n, (op.qubit,), noise.p1)
        elif not isinstance(op, Permutation):
            mat = _depolarize(mat, n, op_qubits(op), noise.p2)
    out = DensityMatrix(n, mat)
    out.validate()
    return out


def _spam_convolve(probs: np.ndarray, n: int, p_flip: float) -> np.ndarray:
    """Push outcome probabilities through independent per-bit flips."""
    if p_flip == 0.0:
        return probs
    out = probs.copy()
    for axis in range(n):
        view = out.reshape(1 << axis, 2, -1)
        a = view[:, 0, :].copy()
        b = view[:, 1, :].copy()
        view[:, 0, :] = (1.0 - p_flip) * a + p_flip * b
        view[:, 1, :] = p_flip * a + (1.0 - p_flip) * b
    return out


def noisy_measure(
    rho: DensityMatrix, noise: NoiseModel, n_shots: int, rng: np.random.Generator
) -> dict[str, int]:
    """Sample computational-basis counts with SPAM bit-flip errors."""
    if n_shots < 1:
        raise ValueError(f"n_shots must be >= 1, got {n_shots}")
    rho.validate()
    probs = np.diagonal(rho.matrix).real.copy()
    np.clip(probs, 0.0, None, out=probs)
    probs /= probs.sum()
    probs = _spam_convolve(probs, rho.n_qubits, noise.p_spam)
    return _sample_counts(probs, rho.n_qubits, n_shots, rng)


def _exact_subsystem_purity(rho: DensityMatrix, n_sub: int) -> float:
    if n_sub == rho.n_qubits:
        return purity(rho)
    return purity(partial_trace(rho, range(n_sub)))


def hardware_benchmark(
    n_qubits: int,
    method: str,
    graph: CouplingGraph,
    noise: NoiseModel,
    rng: np.random.Generator,
    n_ensemble: int = 10,
    n_settings: int = 20,
    n_shots: int = 1000,
) -> dict[int, tuple[float, float, float]]:
    """Emulate the purity benchmark on a device graph with noise.

    For each ensemble member a fresh scheduled circuit is built, routed onto
    the graph, evolved as a noisy density matrix, and measured in
    ``n_settings`` random local bases with SPAM errors.  Returns, per
    subsystem size n_a in 1..n (always the leading qubits; n_a = n is the
    whole logical register), the ensemble-averaged purity estimate, its
    spread-based standard error, and the ensemble-averaged exact noisy
    purity.
    """
    estimates: dict[int, list[float]] = {k: [] for k in range(1, n_qubits + 1)}
    exacts: dict[int, list[float]] = {k: [] for k in range(1, n_qubits + 1)}
    single_errs: dict[int, float] = {}
    for member_rng in rng.spawn(n_ensemble):
        circuit = build_schedule_circuit(n_qubits, method, member_rng)
        routed = route_circuit(circuit, graph)
        rho = apply_noisy_circuit(DensityMatrix.zero(graph.n_qubits), routed, noise)
        settings = draw_settings(n_qubits, n_settings, member_rng)
        records = []
        for i, (setting, stream) in enumerate(
            zip(settings, member_rng.spawn(n_settings))
        ):
            probs = setting_probabilities(rho, setting)
            probs = _spam_convolve(probs, graph.n_qubits, noise.p_spam)
            counts = _sample_counts(probs, graph.n_qubits, n_shots, stream)
            records.append(ShotRecord(i, n_shots, counts))
        for n_sub in range(1, n_qubits + 1):
            est, err = estimate_purity(records, range(n_sub))
            estimates[n_sub].append(est)
            single_errs[n_sub] = err
            exacts[n_sub].append(_exact_subsystem_purity(rho, n_sub))
    out = {}
    for n_sub in range(1, n_qubits + 1):
        ests = np.array(estimates[n_sub])
        if n_ensemble >= 2:
            err = float(np.std(ests, ddof=1) / np.sqrt(n_ensemble))
        else:
            err = single_errs[n_sub]
        out[n_sub] = (float(np.mean(ests)), err, float(np.mean(exacts[n_sub])))
    return out


def evolution_study(
    n_qubits: int,
    method: str,
    graph: CouplingGraph,
    noise: NoiseModel,
    max_steps: int,
    rng: np.random.Generator,
) -> list[tuple[int, int, float]]:
    """Track exact subsystem purities while iterating the pair schedule.

    Each step applies one freshly randomized scheduled circuit (routed onto
    the graph) to the running density matrix; after every step the exact
    purity of each leading-qubit subsystem n_a in 1..n is recorded.
    Returns (step, n_a, purity) rows, steps starting at 1.
    """
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    rho = DensityMatrix.zero(graph.n_qubits)
    rows = []
    for step in range(1, max_steps + 1):
        circuit = build_schedule_circuit(n_qubits, method, rng)
        routed = route_circuit(circuit, graph)
        rho = apply_noisy_circuit(rho, routed, noise)
        for n_sub in range(1, n_qubits + 1):
            rows.append((step, n_sub, _exact_subsystem_purity(rho, n_sub)))
    return rows
