"""Exact statevector and density-matrix simulation primitives.

Conventions
-----------
Basis-state indexing puts qubit 0 in the *most significant* bit: the basis
state |b0 b1 ... b_{n-1}> has index sum_q b_q * 2^(n-1-q), and the bitstring
"b0b1...b_{n-1}" equals the index written in binary. Rotation gates use the
half-angle convention, e.g. R_y(t) = exp(-i t Y / 2), so R_y(pi/2)|0> =
(|0> + |1>)/sqrt(2). Two-qubit matrices act on the ordered pair (a, b) with
qubit a carrying the high bit of the 2-bit gate index.

All operations are pure: they return new objects and mutate nothing that was
passed in. Randomness always comes from an explicit numpy Generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal, Union

import numpy as np

from . import _kernels as kern

ATOL = 1e-10

Axis = Literal["y", "z"]


@dataclass(frozen=True)
class Rotation:
    """Single-qubit rotation about the y or z axis (half-angle convention)."""

    axis: Axis
    angle: float
    qubit: int


@dataclass(frozen=True)
class CNOT:
    control: int
    target: int


@dataclass(frozen=True)
class SWAP:
    a: int
    b: int


@dataclass(eq=False)
class TwoQubitUnitary:
    """An arbitrary 4x4 unitary acting on the ordered qubit pair `pair`."""

    matrix: np.ndarray
    pair: tuple[int, int]


@dataclass(frozen=True)
class Permutation:
    """Relabeling of all qubits: the qubit labeled q becomes label perm[q]."""

    perm: tuple[int, ...]


GateOp = Union[Rotation, CNOT, SWAP, TwoQubitUnitary, Permutation]


def op_qubits(op: GateOp) -> tuple[int, ...]:
    """The qubit labels an op touches (all labels for a Permutation)."""
    if isinstance(op, Rotation):
        return (op.qubit,)
    if isinstance(op, CNOT):
        return (op.control, op.target)
    if isinstance(op, SWAP):
        return (op.a, op.b)
    if isinstance(op, TwoQubitUnitary):
        return tuple(op.pair)
    if isinstance(op, Permutation):
        return tuple(range(len(op.perm)))
    raise TypeError(f"not a gate op: {op!r}")


def rotation_matrix(axis: Axis, angle: float) -> np.ndarray:
    half = 0.5 * angle
    if axis == "y":
        c, s = np.cos(half), np.sin(half)
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if axis == "z":
        return np.array(
            [[np.exp(-0.5j * angle), 0.0], [0.0, np.exp(0.5j * angle)]],
            dtype=np.complex128,
        )
    raise ValueError(f"rotation axis must be 'y' or 'z', got {axis!r}")


def _is_unitary(m: np.ndarray, atol: float = ATOL) -> bool:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    eye = np.eye(m.shape[0])
    return bool(np.max(np.abs(m.conj().T @ m - eye)) <= atol)


@dataclass(eq=False)
class Circuit:
    """An ordered gate list over `n_qubits` qubits (first op acts first)."""

    n_qubits: int
    ops: list[GateOp] = field(default_factory=list)

    def validate(self) -> None:
        if self.n_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        for op in self.ops:
            self._validate_op(op)

    def _validate_op(self, op: GateOp) -> None:
        n = self.n_qubits
        if isinstance(op, Permutation):
            if sorted(op.perm) != list(range(n)):
                raise ValueError(
                    f"permutation {op.perm} is not a bijection on {n} qubits"
                )
            return
        qubits = op_qubits(op)
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"op targets a qubit twice: {op!r}")
        for q in qubits:
            if not 0 <= q < n:
                raise ValueError(f"qubit {q} out of range for {n}-qubit circuit")
        if isinstance(op, Rotation):
            if op.axis not in ("y", "z"):
                raise ValueError(f"rotation axis must be 'y' or 'z', got {op.axis!r}")
            if not np.isfinite(op.angle):
                raise ValueError("rotation angle must be finite")
        if isinstance(op, TwoQubitUnitary):
            m = np.asarray(op.matrix)
            if m.shape != (4, 4) or not _is_unitary(m):
                raise ValueError("TwoQubitUnitary matrix must be 4x4 unitary")


@dataclass(eq=False)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        if n_qubits < 1:
            raise ValueError("need at least one qubit")
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    def validate(self) -> None:
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError("amplitude array length is not 2**n_qubits")
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > ATOL:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {ATOL}")


@dataclass(eq=False)
class DensityMatrix:
    n_qubits: int
    matrix: np.ndarray

    @classmethod
    def zero(cls, n_qubits: int) -> "DensityMatrix":
        if n_qubits < 1:
            raise ValueError("need at least one qubit")
        dim = 1 << n_qubits
        m = np.zeros((dim, dim), dtype=np.complex128)
        m[0, 0] = 1.0
        return cls(n_qubits, m)

    @classmethod
    def from_state(cls, state: StateVector) -> "DensityMatrix":
        state.validate()
        amps = state.amplitudes
        return cls(state.n_qubits, np.outer(amps, amps.conj()))

    def validate(self) -> None:
        dim = 1 << self.n_qubits
        m = self.matrix
        if m.shape != (dim, dim):
            raise ValueError("density matrix shape is not 2**n x 2**n")
        if np.max(np.abs(m - m.conj().T)) > ATOL:
            raise ValueError("density matrix is not Hermitian within 1e-10")
        if abs(np.trace(m).real - 1.0) > ATOL or abs(np.trace(m).imag) > ATOL:
            raise ValueError("density matrix trace deviates from 1 beyond 1e-10")
        if np.linalg.eigvalsh(m).min() < -1e-8:
            raise ValueError("density matrix has an eigenvalue below -1e-8")


def _shift(n_qubits: int, qubit: int) -> int:
    return n_qubits - 1 - qubit


def _permutation_dest(n_qubits: int, perm: tuple[int, ...]) -> np.ndarray:
    """dest[i] = index of basis state i after relabeling q -> perm[q]."""
    idx = np.arange(1 << n_qubits, dtype=np.intp)
    dest = np.zeros_like(idx)
    for q in range(n_qubits):
        bit = (idx >> _shift(n_qubits, q)) & 1
        dest |= bit << _shift(n_qubits, perm[q])
    return dest


def permutation_to_swaps(perm: tuple[int, ...]) -> list[tuple[int, int]]:
    """Transpositions whose in-order application equals the relabeling `perm`."""
    seen = set()
    swaps: list[tuple[int, int]] = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            seen.add(start)
            continue
        cycle = [start]
        seen.add(start)
        nxt = perm[start]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt]
        for other in cycle[1:]:
            swaps.append((cycle[0], other))
    return swaps


def _apply_op_inplace(amps: np.ndarray, n: int, op: GateOp) -> np.ndarray:
    """Apply one op to a flat amplitude array; returns the (possibly new) array."""
    if isinstance(op, Rotation):
        kern.apply_1q(amps, rotation_matrix(op.axis, op.angle), _shift(n, op.qubit))
    elif isinstance(op, CNOT):
        kern.apply_cnot(amps, _shift(n, op.control), _shift(n, op.target))
    elif isinstance(op, SWAP):
        kern.apply_swap(amps, _shift(n, op.a), _shift(n, op.b))
    elif isinstance(op, TwoQubitUnitary):
        m = np.ascontiguousarray(op.matrix, dtype=np.complex128)
        kern.apply_2q(amps, m, _shift(n, op.pair[0]), _shift(n, op.pair[1]))
    elif isinstance(op, Permutation):
        dest = _permutation_dest(n, op.perm)
        out = np.empty_like(amps)
        out[dest] = amps
        return out
    else:
        raise TypeError(f"not a gate op: {op!r}")
    return amps


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    """Run a circuit on a pure state and return the resulting state."""
    state.validate()
    circuit.validate()
    if circuit.n_qubits != state.n_qubits:
        raise ValueError(
            f"circuit is on {circuit.n_qubits} qubits, state on {state.n_qubits}"
        )
    amps = np.array(state.amplitudes, dtype=np.complex128, copy=True)
    n = state.n_qubits
    for op in circuit.ops:
        amps = _apply_op_inplace(amps, n, op)
    out = StateVector(n, amps)
    out.validate()
    return out


def apply_circuit_mixed(rho: DensityMatrix, circuit: Circuit) -> DensityMatrix:
    """Run a (noiseless) circuit on a density matrix: rho -> U rho U+.

    Left multiplication reuses the statevector kernels on the flattened
    matrix with row-index bit shifts offset by n; right multiplication by U+
    applies the conjugate matrix to the column bits.
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
    return DensityMatrix(n, mat)


def _apply_op_mixed(mat: np.ndarray, n: int, op: GateOp) -> np.ndarray:
    flat = mat.reshape(-1)
    if isinstance(op, Rotation):
        u = rotation_matrix(op.axis, op.angle)
        kern.apply_1q(flat, u, n + _shift(n, op.qubit))
        kern.apply_1q(flat, u.conj(), _shift(n, op.qubit))
    elif isinstance(op, CNOT):
        sc, st = _shift(n, op.control), _shift(n, op.target)
        kern.apply_cnot(flat, n + sc, n + st)
        kern.apply_cnot(flat, sc, st)
    elif isinstance(op, SWAP):
        sa, sb = _shift(n, op.a), _shift(n, op.b)
        kern.apply_swap(flat, n + sa, n + sb)
        kern.apply_swap(flat, sa, sb)
    elif isinstance(op, TwoQubitUnitary):
        u = np.ascontiguousarray(op.matrix, dtype=np.complex128)
        sa, sb = _shift(n, op.pair[0]), _shift(n, op.pair[1])
        kern.apply_2q(flat, u, n + sa, n + sb)
        kern.apply_2q(flat, np.ascontiguousarray(u.conj()), sa, sb)
    elif isinstance(op, Permutation):
        dest = _permutation_dest(n, op.perm)
        out = np.empty_like(mat)
        out[np.ix_(dest, dest)] = mat
        return out
    else:
        raise TypeError(f"not a gate op: {op!r}")
    return mat


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """The full 2^n x 2^n matrix a circuit implements (small n only)."""
    circuit.validate()
    n = circuit.n_qubits
    dim = 1 << n
    cols = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(dim):
        amps = np.zeros(dim, dtype=np.complex128)
        amps[i] = 1.0
        for op in circuit.ops:
            amps = _apply_op_inplace(amps, n, op)
        cols[:, i] = amps
    return cols


def _check_keep(n_qubits: int, keep: Iterable[int]) -> list[int]:
    kept = sorted(set(int(q) for q in keep))
    if not kept:
        raise ValueError("keep must name at least one qubit")
    if kept[0] < 0 or kept[-1] >= n_qubits:
        raise ValueError(f"keep {kept} out of range for {n_qubits} qubits")
    return kept


def _split_matrix(state: StateVector, part: list[int]) -> np.ndarray:
    """Amplitudes as a matrix with `part` indexing rows, the rest columns."""
    n = state.n_qubits
    rest = [q for q in range(n) if q not in part]
    tensor = state.amplitudes.reshape([2] * n)
    return tensor.transpose(part + rest).reshape(1 << len(part), 1 << len(rest))


def reduced_density_matrix(state: StateVector, keep: Iterable[int]) -> DensityMatrix:
    """Partial trace of a pure state onto `keep` (ascending label order)."""
    state.validate()
    kept = _check_keep(state.n_qubits, keep)
    psi = _split_matrix(state, kept)
    return DensityMatrix(len(kept), psi @ psi.conj().T)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Partial trace of a density matrix onto `keep` (ascending label order)."""
    rho.validate()
    n = rho.n_qubits
    kept = _check_keep(n, keep)
    rest = [q for q in range(n) if q not in kept]
    tensor = rho.matrix.reshape([2] * (2 * n))
    order = kept + rest + [n + q for q in kept] + [n + q for q in rest]
    da, db = 1 << len(kept), 1 << len(rest)
    tensor = tensor.transpose(order).reshape(da, db, da, db)
    return DensityMatrix(len(kept), np.trace(tensor, axis1=1, axis2=3))


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2). Validates the input; range (0, 1] for a valid state."""
    rho.validate()
    t = np.trace(rho.matrix @ rho.matrix)
    if abs(t.imag) > ATOL:
        raise ValueError(f"purity has imaginary residue {t.imag}")
    return float(t.real)


def renyi2_entropy(rho: DensityMatrix) -> float:
    """Second Renyi entropy -log2 Tr(rho^2), in bits."""
    return float(-np.log2(purity(rho)))


def subsystem_purity(state: StateVector, keep: Iterable[int]) -> float:
    """Tr(rho_A^2) for the reduction of a pure state onto `keep`.

    Contracts the amplitude matrix directly (Gram matrix of the split) and
    uses the smaller side of the bipartition, which gives the same value by
    purity complementarity of pure states.
    """
    state.validate()
    kept = _check_keep(state.n_qubits, keep)
    n = state.n_qubits
    if len(kept) > n - len(kept):
        kept = [q for q in range(n) if q not in kept]
    if not kept:  # keep was the full register
        return 1.0
    psi = _split_matrix(state, kept)
    gram = psi @ psi.conj().T
    return float(np.vdot(gram, gram).real)


def probabilities(state: StateVector) -> np.ndarray:
    """Born-rule probabilities over all basis states."""
    state.validate()
    return np.abs(state.amplitudes) ** 2


def sample_counts(
    state: StateVector, n_shots: int, rng: np.random.Generator
) -> dict[str, int]:
    """Multinomial samples of computational-basis outcomes.

    Returns a {bitstring: count} dict containing only observed outcomes;
    bitstrings read qubit 0 first (the index in binary).
    """
    if n_shots < 1:
        raise ValueError("n_shots must be positive")
    p = probabilities(state)
    p = p / p.sum()
    counts = rng.multinomial(n_shots, p)
    n = state.n_qubits
    return {
        format(i, f"0{n}b"): int(c) for i, c in enumerate(counts) if c > 0
    }
