"""Pure-numpy statevector kernels.

Fallback implementations used when the compiled extension is unavailable
(or when ENTANGLEBENCH_KERNEL=python). All functions operate in place on a
1-D contiguous complex128 amplitude array and address qubits by *bit shift*,
i.e. the bit position of the qubit within the basis-state index. Callers are
responsible for translating qubit labels to shifts.
"""

from __future__ import annotations

import numpy as np


def apply_1q(amps: np.ndarray, u: np.ndarray, shift: int) -> None:
    """Apply a 2x2 unitary to the qubit at bit position `shift`, in place."""
    step = 1 << shift
    view = amps.reshape(-1, 2, step)
    a = view[:, 0, :].copy()
    b = view[:, 1, :]
    view[:, 0, :] = u[0, 0] * a + u[0, 1] * b
    view[:, 1, :] = u[1, 0] * a + u[1, 1] * b


def apply_2q(amps: np.ndarray, u: np.ndarray, shift_hi: int, shift_lo: int) -> None:
    """Apply a 4x4 unitary to two qubits, in place.

    `shift_hi` is the bit position of the qubit carrying the high bit of the
    gate's 2-bit basis index, `shift_lo` the low bit. The two shifts must
    differ but may be in either numeric order.
    """
    p, q = (shift_hi, shift_lo) if shift_hi > shift_lo else (shift_lo, shift_hi)
    view = amps.reshape(-1, 2, 1 << (p - q - 1), 2, 1 << q)

    def slot(g: int):
        b_hi, b_lo = (g >> 1) & 1, g & 1
        bp, bq = (b_hi, b_lo) if shift_hi > shift_lo else (b_lo, b_hi)
        return view[:, bp, :, bq, :]

    old = [slot(g).copy() for g in range(4)]
    for g in range(4):
        slot(g)[...] = (
            u[g, 0] * old[0] + u[g, 1] * old[1] + u[g, 2] * old[2] + u[g, 3] * old[3]
        )


def apply_cnot(amps: np.ndarray, shift_c: int, shift_t: int) -> None:
    """Apply a CNOT (control/target given as bit positions), in place."""
    dim = amps.shape[0]
    idx = np.arange(dim, dtype=np.intp)
    i0 = idx[((idx >> shift_c) & 1 == 1) & ((idx >> shift_t) & 1 == 0)]
    i1 = i0 | (1 << shift_t)
    tmp = amps[i0].copy()
    amps[i0] = amps[i1]
    amps[i1] = tmp


def apply_swap(amps: np.ndarray, shift_a: int, shift_b: int) -> None:
    """Swap two qubits (bit positions), in place."""
    dim = amps.shape[0]
    idx = np.arange(dim, dtype=np.intp)
    i0 = idx[((idx >> shift_a) & 1 == 1) & ((idx >> shift_b) & 1 == 0)]
    i1 = (i0 ^ (1 << shift_a)) | (1 << shift_b)
    tmp = amps[i0].copy()
    amps[i0] = amps[i1]
    amps[i1] = tmp
