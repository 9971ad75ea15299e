"""Random-object samplers and pseudo-random state generator circuits.

This module provides the randomness sources used everywhere else:

* ``haar_unitary`` draws unitary matrices from the Haar measure (Ginibre
  matrix + QR with phase correction).
* ``exact_random_state`` draws Haar-random pure states directly; it is the
  ground-truth oracle the generator circuits are compared against.
* ``sample_direct_angles`` / ``build_direct_circuit`` implement the
  six-rotation, one-CNOT two-qubit random-state block ("Direct" block).
* ``build_generator_circuit`` stacks layers of random qubit permutations and
  two-qubit blocks into an n-qubit pseudo-random state generator.
* ``kak_decompose`` factors any 4x4 unitary into four single-qubit unitaries
  around a three-parameter canonical interaction and emits an equivalent
  circuit with exactly 3 CNOTs and 15 single-qubit rotations.

All sampling routines take an explicit ``numpy.random.Generator`` so results
are reproducible and streams can be split across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .simcore import (
    CNOT,
    Circuit,
    Permutation,
    Rotation,
    StateVector,
    TwoQubitUnitary,
    circuit_unitary,
    rotation_matrix,
)

__all__ = [
    "DirectAngles",
    "GeneratorMethod",
    "KakDecomposition",
    "KakError",
    "haar_unitary",
    "exact_random_state",
    "sample_direct_angles",
    "build_direct_circuit",
    "build_generator_circuit",
    "min_entangling_layers",
    "kak_decompose",
]

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Haar sampling


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a ``dim x dim`` unitary from the Haar measure.

    Uses the standard construction: QR-decompose a complex Ginibre matrix
    and absorb the phases of R's diagonal into Q, which makes the
    distribution exactly left- and right-invariant.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z / math.sqrt(2.0))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def exact_random_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    """Draw a Haar-random pure state on ``n_qubits`` qubits.

    Normalizing a vector of i.i.d. standard complex Gaussians is equivalent
    to applying a Haar unitary to a fixed state, but costs O(2^n) instead of
    O(4^n); this is the oracle generator used in convergence studies.
    """
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
    z = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return StateVector(n_qubits, z / np.linalg.norm(z))


# ---------------------------------------------------------------------------
# Direct two-qubit random-state block


@dataclass(frozen=True)
class DirectAngles:
    """The six rotation angles of a Direct two-qubit block.

    ``theta1``, ``theta3``, ``theta5`` are polar angles in [0, pi];
    ``theta2``, ``theta4``, ``theta6`` are azimuthal phases in [0, 2*pi).
    """

    theta1: float
    theta2: float
    theta3: float
    theta4: float
    theta5: float
    theta6: float

    def __post_init__(self) -> None:
        for name in ("theta1", "theta3", "theta5"):
            v = getattr(self, name)
            if not 0.0 <= v <= math.pi:
                raise ValueError(f"{name} must lie in [0, pi], got {v}")
        for name in ("theta2", "theta4", "theta6"):
            v = getattr(self, name)
            if not 0.0 <= v < TWO_PI:
                raise ValueError(f"{name} must lie in [0, 2*pi), got {v}")


def sample_direct_angles(rng: np.random.Generator) -> DirectAngles:
    """Sample Direct-block angles so that the block maps |00> to a random state.

    The densities are chosen so the output state is uniformly distributed:
    cos(theta1) = (1 - 2u)^(1/3) (density proportional to cos^2 sin, which
    reproduces the two-qubit Schmidt-weight distribution), cos(theta3) and
    cos(theta5) uniform on [-1, 1] (sphere-uniform local bases), and the
    three phase angles uniform on [0, 2*pi).  Angles are drawn in index
    order, consuming seven uniforms from ``rng``.
    """
    theta1 = math.acos(np.cbrt(1.0 - 2.0 * rng.random()))
    theta2 = TWO_PI * rng.random()
    theta3 = math.acos(1.0 - 2.0 * rng.random())
    theta4 = TWO_PI * rng.random()
    theta5 = math.acos(1.0 - 2.0 * rng.random())
    theta6 = TWO_PI * rng.random()
    return DirectAngles(theta1, theta2, theta3, theta4, theta5, theta6)


def _direct_block_ops(angles: DirectAngles, a: int, b: int) -> list:
    """Ops of a Direct block acting on the ordered qubit pair (a, b)."""
    return [
        Rotation("y", angles.theta1, a),
        CNOT(a, b),
        Rotation("z", angles.theta2, a),
        Rotation("y", angles.theta3, a),
        Rotation("z", angles.theta4, a),
        Rotation("y", angles.theta5, b),
        Rotation("z", angles.theta6, b),
    ]


def build_direct_circuit(angles: DirectAngles) -> Circuit:
    """Build the two-qubit Direct block: 1 CNOT and 6 rotations.

    Gate order: Ry(theta1) on qubit 0; CNOT(0 -> 1); Rz(theta2), Ry(theta3),
    Rz(theta4) on qubit 0; Ry(theta5), Rz(theta6) on qubit 1.
    """
    return Circuit(2, _direct_block_ops(angles, 0, 1))


# ---------------------------------------------------------------------------
# Layered generators


@dataclass(frozen=True)
class GeneratorMethod:
    """Which block family a layered generator uses, and how many layers."""

    tag: str
    layers: int

    def __post_init__(self) -> None:
        if self.tag not in ("Direct", "KAK"):
            raise ValueError(f"tag must be 'Direct' or 'KAK', got {self.tag!r}")
        if self.layers < 1:
            raise ValueError(f"layers must be >= 1, got {self.layers}")


def build_generator_circuit(
    n_qubits: int, method: GeneratorMethod, rng: np.random.Generator
) -> Circuit:
    """Build an n-qubit pseudo-random state generator circuit.

    Each of the ``method.layers`` layers is a uniformly random relabeling of
    the qubits followed by floor(n/2) two-qubit blocks on the label pairs
    (0, 1), (2, 3), ...; for odd n the highest label idles for that layer.
    Blocks are Direct blocks (``tag="Direct"``) or fresh Haar 4x4 unitaries
    applied as single ops (``tag="KAK"``).

    Per layer the stream order is: permutation first, then blocks from the
    lowest pair up; a Direct block consumes its six angles in index order.
    """
    if n_qubits < 2:
        raise ValueError(f"n_qubits must be >= 2, got {n_qubits}")
    ops: list = []
    for _ in range(method.layers):
        perm = tuple(int(x) for x in rng.permutation(n_qubits))
        ops.append(Permutation(perm))
        for low in range(0, n_qubits - 1, 2):
            pair = (low, low + 1)
            if method.tag == "Direct":
                ops.extend(_direct_block_ops(sample_direct_angles(rng), *pair))
            else:
                ops.append(TwoQubitUnitary(haar_unitary(4, rng), pair))
    return Circuit(n_qubits, ops)


def min_entangling_layers(n_qubits: int) -> int:
    """Layers needed before every unordered qubit pair can have interacted.

    Each layer supplies floor(n/2) two-qubit blocks, so covering all
    n(n-1)/2 pairs takes at least ceil(n(n-1)/2 / floor(n/2)) layers.
    """
    if n_qubits < 2:
        raise ValueError(f"n_qubits must be >= 2, got {n_qubits}")
    return -(-math.comb(n_qubits, 2) // (n_qubits // 2))


# ---------------------------------------------------------------------------
# KAK decomposition of 4x4 unitaries
#
# The magic basis maps SU(2) x SU(2) onto SO(4) and simultaneously
# diagonalizes the XX, YY and ZZ couplings, reducing the factorization of a
# two-qubit unitary to a real symmetric eigenproblem.

_MAGIC = np.array(
    [
        [1, 0, 0, 1j],
        [0, 1j, 1, 0],
        [0, 1j, -1, 0],
        [1, 0, 0, -1j],
    ],
    dtype=complex,
) / math.sqrt(2.0)

_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _coupling_diagonal(label: str) -> np.ndarray:
    p = _PAULI[label]
    return np.real(np.diag(_MAGIC.conj().T @ np.kron(p, p) @ _MAGIC))


_D_XX = _coupling_diagonal("X")
_D_YY = _coupling_diagonal("Y")
_D_ZZ = _coupling_diagonal("Z")
# Columns: global phase, then the three canonical coupling strengths.
_ANGLE_SOLVE = np.column_stack([np.ones(4), _D_XX, _D_YY, _D_ZZ])

# Fixed local corrections that turn the 3-CNOT template below into the exact
# canonical interaction exp(i*(a XX + b YY + c ZZ)) up to a constant phase.
_ry = lambda t: rotation_matrix("y", t)  # noqa: E731
_rz = lambda t: rotation_matrix("z", t)  # noqa: E731
_POST_Q0 = _ry(math.pi / 2) @ _rz(-math.pi / 2)
_POST_Q1 = _rz(-math.pi) @ _ry(math.pi / 2) @ _rz(math.pi)
_PRE_Q0 = _ry(math.pi / 2)
_PRE_Q1 = _rz(-math.pi / 2) @ _ry(math.pi / 2) @ _rz(math.pi)
del _ry, _rz


class KakError(RuntimeError):
    """Numerical failure inside kak_decompose (never silently ignored)."""


@dataclass(eq=False)
class KakDecomposition:
    """Result of factoring a two-qubit unitary.

    The factorization is ``U = (a1 kron a2) @ N @ (a3 kron a4)`` exactly
    (any global phase is absorbed into ``a1``), where
    ``N = exp(i*(a XX + b YY + c ZZ))`` with ``cartan == (a, b, c)``.
    ``circuit`` realizes U up to a global phase with 3 CNOTs and 15
    single-qubit rotations; a1/a3 act on qubit 0, a2/a4 on qubit 1, and
    a3 kron a4 is applied first in time.
    """

    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    a4: np.ndarray
    cartan: tuple[float, float, float]
    circuit: Circuit = field(repr=False)


def _offdiag_norm(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - np.diag(np.diagonal(m)))))


def _refine_clusters(vecs: np.ndarray, vals: np.ndarray, other: np.ndarray) -> np.ndarray:
    """Rotate degenerate eigenspaces of one matrix to diagonalize the other."""
    out = vecs.copy()
    start = 0
    for stop in range(1, len(vals) + 1):
        if stop < len(vals) and vals[stop] - vals[stop - 1] < 1e-7:
            continue
        if stop - start > 1:
            block = out[:, start:stop]
            _, q = np.linalg.eigh(block.T @ other @ block)
            out[:, start:stop] = block @ q
        start = stop
    return out


def _joint_diagonalize(r: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Find a real orthogonal O diagonalizing two commuting symmetric matrices.

    Diagonalizes a mix cos(t)*r + sin(t)*s, then fixes any remaining
    degeneracy against the complementary matrix; several deterministic mixing
    angles are tried and the basis with the smallest joint off-diagonal
    residual wins.
    """
    best: np.ndarray | None = None
    best_resid = math.inf
    for t in (0.0, math.pi / 2, *np.linspace(0.213, 1.471, 11)):
        mix = math.cos(t) * r + math.sin(t) * s
        vals, vecs = np.linalg.eigh(mix)
        probe = s if abs(math.cos(t)) >= abs(math.sin(t)) else r
        vecs = _refine_clusters(vecs, vals, probe)
        resid = max(_offdiag_norm(vecs.T @ r @ vecs), _offdiag_norm(vecs.T @ s @ vecs))
        if resid < best_resid:
            best, best_resid = vecs, resid
        if best_resid < 1e-10:
            break
    if best is None or best_resid > 1e-8:
        raise KakError(
            "simultaneous diagonalization did not converge "
            f"(best off-diagonal residual {best_resid:.3e})"
        )
    return best


def _kron_split(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Factor a tensor-product unitary into its 2x2 factors."""
    blocks = m.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3)
    norms = np.linalg.norm(blocks, axis=(2, 3))
    i, j = np.unravel_index(int(np.argmax(norms)), (2, 2))
    pivot = blocks[i, j]
    a2 = pivot / np.sqrt(np.linalg.det(pivot))
    a1 = np.einsum("ijkl,kl->ij", blocks, a2.conj()) / 2.0
    if np.max(np.abs(np.kron(a1, a2) - m)) > 1e-9:
        raise KakError("matrix is not a tensor product of single-qubit unitaries")
    return a1, a2


def _zyz_ops(m: np.ndarray, qubit: int) -> list[Rotation]:
    """Euler-decompose a 2x2 unitary as Rz(phi) Ry(theta) Rz(lam) on a qubit.

    The unitary's overall phase is dropped; the three ops are returned in
    application order (lam first).
    """
    su = m / np.sqrt(np.linalg.det(m))
    theta = 2.0 * math.atan2(abs(su[1, 0]), abs(su[0, 0]))
    if abs(su[1, 0]) < 1e-9:
        phi, lam = 2.0 * np.angle(su[1, 1]), 0.0
    elif abs(su[0, 0]) < 1e-9:
        phi, lam = 2.0 * np.angle(su[1, 0]), 0.0
    else:
        total = 2.0 * np.angle(su[1, 1])
        diff = 2.0 * np.angle(su[1, 0])
        phi, lam = 0.5 * (total + diff), 0.5 * (total - diff)
    return [
        Rotation("z", float(lam), qubit),
        Rotation("y", float(theta), qubit),
        Rotation("z", float(phi), qubit),
    ]


def _canonical_template_ops(a: float, b: float, c: float) -> list:
    """3-CNOT core realizing the canonical interaction up to fixed locals."""
    return [
        CNOT(0, 1),
        Rotation("z", 2.0 * a - math.pi / 2, 1),
        Rotation("y", 2.0 * b - math.pi / 2, 0),
        CNOT(1, 0),
        Rotation("y", 2.0 * c - math.pi / 2, 0),
        CNOT(0, 1),
    ]


def phase_aligned_error(candidate: np.ndarray, target: np.ndarray) -> float:
    """Max-abs deviation between two matrices, ignoring global phase."""
    tr = np.trace(candidate.conj().T @ target)
    if abs(tr) < 1e-12:
        return math.inf
    return float(np.max(np.abs(target - (tr / abs(tr)) * candidate)))


def kak_decompose(u: np.ndarray) -> KakDecomposition:
    """Factor a 4x4 unitary into locals around a canonical interaction.

    Returns a :class:`KakDecomposition` whose matrix factorization
    reconstructs ``u`` exactly and whose circuit (3 CNOTs, 15 rotations)
    reconstructs it up to a global phase within 1e-9.

    Raises ``ValueError`` for a non-unitary input and :class:`KakError` when
    a numerical step fails to converge, rather than returning a degraded
    decomposition.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {u.shape}")
    if np.max(np.abs(u.conj().T @ u - np.eye(4))) > 1e-10:
        raise ValueError("matrix is not unitary within 1e-10")

    # Move to the magic basis with unit determinant; the symmetrized matrix
    # theta is then diagonalized by a real orthogonal basis.
    su = u / np.linalg.det(u) ** 0.25
    v = _MAGIC.conj().T @ su @ _MAGIC
    theta = v.T @ v
    basis = _joint_diagonalize(theta.real, theta.imag)
    if np.linalg.det(basis) < 0.0:
        basis = basis.copy()
        basis[:, 0] = -basis[:, 0]

    eig = np.diagonal(basis.T @ theta @ basis).copy()
    eig /= np.abs(eig)
    half_angles = 0.5 * np.angle(eig)
    # det(theta) = 1 forces the half-angle sum to 0 mod pi; land it on 0 so
    # both orthogonal factors below have determinant +1.
    if np.real(np.prod(np.exp(1j * half_angles))) < 0.0:
        half_angles[0] -= math.pi

    root_inv = basis @ np.diag(np.exp(-1j * half_angles)) @ basis.T
    q = v @ root_inv
    if np.max(np.abs(q.imag)) > 1e-8:
        raise KakError("orthogonal factor came out non-real; diagonalization failed")
    q = q.real
    if np.max(np.abs(q.T @ q - np.eye(4))) > 1e-8:
        raise KakError("orthogonal factor lost orthogonality")

    left = _MAGIC @ (q @ basis) @ _MAGIC.conj().T
    right = _MAGIC @ basis.T @ _MAGIC.conj().T
    a1, a2 = _kron_split(left)
    a3, a4 = _kron_split(right)
    _, ca, cb, cc = np.linalg.solve(_ANGLE_SOLVE, half_angles)

    canonical = _MAGIC @ (
        np.exp(1j * (ca * _D_XX + cb * _D_YY + cc * _D_ZZ))[:, None]
        * _MAGIC.conj().T
    )
    rebuilt = np.kron(a1, a2) @ canonical @ np.kron(a3, a4)
    tr = np.trace(rebuilt.conj().T @ u)
    a1 = a1 * (tr / abs(tr))
    if np.max(np.abs(np.kron(a1, a2) @ canonical @ np.kron(a3, a4) - u)) > 1e-9:
        raise KakError("matrix factorization failed to reconstruct the input")

    ops = [
        *_zyz_ops(_PRE_Q0 @ a3, 0),
        *_zyz_ops(_PRE_Q1 @ a4, 1),
        *_canonical_template_ops(ca, cb, cc),
        *_zyz_ops(a1 @ _POST_Q0, 0),
        *_zyz_ops(a2 @ _POST_Q1, 1),
    ]
    circuit = Circuit(2, ops)
    err = phase_aligned_error(circuit_unitary(circuit), u)
    if err > 1e-9:
        raise KakError(f"circuit reconstruction error {err:.3e} exceeds 1e-9")
    return KakDecomposition(a1, a2, a3, a4, (float(ca), float(cb), float(cc)), circuit)
