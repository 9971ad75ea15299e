#!/usr/bin/env python3
"""Compare the compiled statevector kernels against the numpy fallback.

Raw gate throughput is measured in-process by importing both kernel modules
side by side.  The end-to-end workload (a pseudo-random generator ensemble)
re-runs this script in a subprocess with ENTANGLEBENCH_KERNEL forced, so
each backend is picked up through the normal import-time selection.

Usage:
    python3 benchmarks/kernel_benchmark.py
    python3 benchmarks/kernel_benchmark.py --qubits 8 14 18 --members 10
"""

import argparse
import json
import os
import subprocess
import sys
from time import perf_counter

import numpy as np

from entanglebench._kernels import _pykernels

try:
    from entanglebench._kernels import _cykernels
except ImportError:
    _cykernels = None

BACKENDS = {"python": _pykernels, "cython": _cykernels}


def random_state(n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    amps = rng.standard_normal(1 << n_qubits) + 1j * rng.standard_normal(
        1 << n_qubits
    )
    return np.ascontiguousarray(amps / np.linalg.norm(amps), dtype=np.complex128)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return np.ascontiguousarray(q * (np.diagonal(r) / np.abs(np.diagonal(r))))


def time_gates(impl, n_qubits: int, repeats: int, seed: int) -> dict[str, float]:
    """Seconds per application for each kernel, averaged over `repeats` calls."""
    rng = np.random.default_rng(seed)
    amps = random_state(n_qubits, rng)
    u2 = random_unitary(2, rng)
    u4 = random_unitary(4, rng)
    shifts = [i % n_qubits for i in range(repeats)]
    pairs = [(i % n_qubits, (i + 1) % n_qubits) for i in range(repeats)]

    out = {}
    t0 = perf_counter()
    for s in shifts:
        impl.apply_1q(amps, u2, s)
    out["apply_1q"] = (perf_counter() - t0) / repeats

    t0 = perf_counter()
    for hi, lo in pairs:
        impl.apply_2q(amps, u4, hi, lo)
    out["apply_2q"] = (perf_counter() - t0) / repeats

    t0 = perf_counter()
    for hi, lo in pairs:
        impl.apply_cnot(amps, hi, lo)
    out["apply_cnot"] = (perf_counter() - t0) / repeats
    return out


def run_workload(n_qubits: int, layers: int, members: int) -> float:
    """Build and simulate a Direct generator ensemble; returns seconds."""
    from entanglebench.randgen import GeneratorMethod, build_generator_circuit
    from entanglebench.simcore import StateVector, apply_circuit, subsystem_purity

    rng = np.random.default_rng(11)
    method = GeneratorMethod("Direct", layers)
    t0 = perf_counter()
    for _ in range(members):
        circuit = build_generator_circuit(n_qubits, method, rng)
        state = apply_circuit(StateVector.zero(n_qubits), circuit)
        for k in range(1, n_qubits):
            subsystem_purity(state, range(k))
    return perf_counter() - t0


def workload_in_subprocess(backend: str, args) -> float | None:
    env = dict(os.environ, ENTANGLEBENCH_KERNEL=backend)
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--child",
         "--workload-qubits", str(args.workload_qubits),
         "--layers", str(args.layers), "--members", str(args.members)],
        env=env, capture_output=True, text=True,
    )
    if proc.returncode != 0:
        return None
    reply = json.loads(proc.stdout)
    assert reply["backend"] == backend, reply
    return reply["seconds"]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--qubits", type=int, nargs="+", default=[8, 12, 16, 20])
    parser.add_argument("--workload-qubits", type=int, default=8)
    parser.add_argument("--layers", type=int, default=20)
    parser.add_argument("--members", type=int, default=20)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.child:
        from entanglebench._kernels import BACKEND

        seconds = run_workload(args.workload_qubits, args.layers, args.members)
        json.dump({"backend": BACKEND, "seconds": seconds}, sys.stdout)
        return 0

    if _cykernels is None:
        print("compiled extension not available; showing the numpy fallback only")

    print("raw gate timings (microseconds per application)")
    header = f"{'gate':<11}{'qubits':>7}{'python':>12}{'cython':>12}{'speedup':>9}"
    print(header)
    for n in args.qubits:
        repeats = max(3, (1 << 21) >> n)
        rows = {
            name: time_gates(impl, n, repeats, args.seed)
            for name, impl in BACKENDS.items()
            if impl is not None
        }
        for gate in ("apply_1q", "apply_2q", "apply_cnot"):
            py = rows["python"][gate] * 1e6
            if "cython" in rows:
                cy = rows["cython"][gate] * 1e6
                print(f"{gate:<11}{n:>7}{py:>12.2f}{cy:>12.2f}{py / cy:>8.1f}x")
            else:
                print(f"{gate:<11}{n:>7}{py:>12.2f}{'-':>12}{'-':>9}")

    print()
    print(
        f"generator ensemble workload: Direct, n={args.workload_qubits}, "
        f"{args.layers} layers, {args.members} members"
    )
    times = {}
    for backend in ("python", "cython"):
        if BACKENDS[backend] is None:
            continue
        seconds = workload_in_subprocess(backend, args)
        if seconds is None:
            print(f"  {backend:<8} failed")
            continue
        times[backend] = seconds
        print(f"  {backend:<8}{seconds:>8.2f} s")
    if len(times) == 2:
        print(f"  speedup {times['python'] / times['cython']:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
