"""Pseudo-random quantum state generation and entanglement benchmarking.

Subpackages and modules:

- simcore: statevector / density-matrix simulation primitives
- randgen: random-state generators (direct two-qubit blocks, Haar blocks)
  and the decomposition of two-qubit unitaries into CNOTs + rotations
- moments: exact purity statistics of random bipartite pure states
- randmeas: randomized-measurement purity estimation
- hardware: coupling graphs, routing, depolarizing/readout noise emulation
- experiments / cli: reproducible experiment runners and the entangle-bench
  command line front end
"""

from ._kernels import BACKEND as kernel_backend
from .simcore import (
    CNOT,
    SWAP,
    Circuit,
    DensityMatrix,
    Permutation,
    Rotation,
    StateVector,
    TwoQubitUnitary,
    apply_circuit,
    apply_circuit_mixed,
    partial_trace,
    purity,
    reduced_density_matrix,
    renyi2_entropy,
    sample_counts,
    subsystem_purity,
)

__version__ = "0.1.0"

__all__ = [
    "CNOT",
    "SWAP",
    "Circuit",
    "DensityMatrix",
    "Permutation",
    "Rotation",
    "StateVector",
    "TwoQubitUnitary",
    "apply_circuit",
    "apply_circuit_mixed",
    "kernel_backend",
    "partial_trace",
    "purity",
    "reduced_density_matrix",
    "renyi2_entropy",
    "sample_counts",
    "subsystem_purity",
    "__version__",
]
