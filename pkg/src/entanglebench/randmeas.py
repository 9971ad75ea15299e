"""Randomized-measurement purity estimation from local random bases.

Each measurement setting rotates every qubit by an independent Haar-random
2x2 unitary before a computational-basis readout.  Second-order correlations
across the repeated shots of a setting give an unbiased estimator of any
subsystem purity:

    X = 2^k * sum_{s, s'} (-2)^(-D(s, s')) * est[P(s) P(s')]

where s, s' run over the k-bit subsystem outcomes, D is the Hamming
distance, and est[P(s)P(s')] is the unbiased product estimator
c_s c_s' / (N(N-1)) off the diagonal and c_s (c_s - 1) / (N(N-1)) on it.
Averaging X over settings yields the estimate; the cross-setting spread
yields its standard error.

Shot data round-trips through a JSON-lines format (one record per line) so
externally acquired counts can be fed to the same estimator.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from ._kernels import apply_1q
from .randgen import haar_unitary
from .simcore import DensityMatrix, StateVector

__all__ = [
    "MeasurementSetting",
    "ShotRecord",
    "draw_settings",
    "setting_probabilities",
    "simulate_randomized_measurements",
    "marginal_counts",
    "purity_from_counts",
    "purity_from_probabilities",
    "estimate_purity",
    "write_records",
    "read_records",
]


@dataclass(frozen=True)
class MeasurementSetting:
    """One local measurement basis: a 2x2 unitary per qubit."""

    unitaries: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        for k, u in enumerate(self.unitaries):
            if u.shape != (2, 2):
                raise ValueError(f"setting unitary {k} is not 2x2")
            if np.max(np.abs(u.conj().T @ u - np.eye(2))) > 1e-12:
                raise ValueError(f"setting unitary {k} is not unitary within 1e-12")

    @property
    def n_qubits(self) -> int:
        return len(self.unitaries)


@dataclass(frozen=True)
class ShotRecord:
    """Counts of full-register outcomes for one measurement setting."""

    setting: int
    n_shots: int
    counts: dict[str, int]

    def __post_init__(self) -> None:
        if self.setting < 0:
            raise ValueError(f"setting index must be >= 0, got {self.setting}")
        if self.n_shots < 1:
            raise ValueError(f"n_shots must be >= 1, got {self.n_shots}")
        lengths = {len(k) for k in self.counts}
        if len(lengths) != 1:
            raise ValueError("count bitstrings must all have the same length")
        for key, value in self.counts.items():
            if set(key) - {"0", "1"}:
                raise ValueError(f"invalid bitstring {key!r}")
            if value < 0:
                raise ValueError(f"negative count for {key!r}")
        if sum(self.counts.values()) != self.n_shots:
            raise ValueError("counts do not sum to n_shots")

    @property
    def n_qubits(self) -> int:
        return len(next(iter(self.counts)))


def draw_settings(
    n_qubits: int, n_settings: int, rng: np.random.Generator
) -> list[MeasurementSetting]:
    """Draw independent Haar local bases for every qubit of every setting."""
    if n_settings < 2:
        raise ValueError("need at least 2 settings to average the estimator")
    return [
        MeasurementSetting(tuple(haar_unitary(2, rng) for _ in range(n_qubits)))
        for _ in range(n_settings)
    ]


def setting_probabilities(
    state: Union[StateVector, DensityMatrix], setting: MeasurementSetting
) -> np.ndarray:
    """Outcome probabilities after applying a setting's local rotations.

    The setting may address fewer qubits than the state carries; rotations
    then act on the leading qubits and the rest are measured unrotated.
    """
    k = setting.n_qubits
    if isinstance(state, StateVector):
        n = state.n_qubits
        if k > n:
            raise ValueError(f"setting has {k} qubits but the state only {n}")
        amps = np.array(state.amplitudes, dtype=np.complex128, copy=True)
        for q, u in enumerate(setting.unitaries):
            apply_1q(amps, np.ascontiguousarray(u), n - 1 - q)
        probs = np.abs(amps) ** 2
    else:
        n = state.n_qubits
        if k > n:
            raise ValueError(f"setting has {k} qubits but the state only {n}")
        flat = np.array(state.matrix, dtype=np.complex128, copy=True).reshape(-1)
        for q, u in enumerate(setting.unitaries):
            u = np.ascontiguousarray(u)
            apply_1q(flat, u, (n - 1 - q) + n)  # left factor U
            apply_1q(flat, u.conj(), n - 1 - q)  # right factor U^dagger
        probs = np.diagonal(flat.reshape(1 << n, 1 << n)).real.copy()
    np.clip(probs, 0.0, None, out=probs)
    return probs / probs.sum()


def _sample_counts(
    probs: np.ndarray, n_qubits: int, n_shots: int, rng: np.random.Generator
) -> dict[str, int]:
    draws = rng.multinomial(n_shots, probs)
    width = f"0{n_qubits}b"
    return {format(i, width): int(c) for i, c in enumerate(draws) if c > 0}


def simulate_randomized_measurements(
    state: Union[StateVector, DensityMatrix],
    settings: Iterable[MeasurementSetting],
    n_shots: int,
    rng: np.random.Generator,
) -> list[ShotRecord]:
    """Measure a state in every setting, n_shots repetitions each.

    Each setting consumes its own child generator (``rng.spawn``), so
    records are identical whether settings are processed sequentially or in
    parallel workers.
    """
    settings = list(settings)
    if n_shots < 1:
        raise ValueError(f"n_shots must be >= 1, got {n_shots}")
    n = state.n_qubits
    for setting in settings:
        if setting.n_qubits != n:
            raise ValueError(
                f"setting has {setting.n_qubits} qubits, state has {n}"
            )
    records = []
    for i, (setting, stream) in enumerate(zip(settings, rng.spawn(len(settings)))):
        probs = setting_probabilities(state, setting)
        records.append(ShotRecord(i, n_shots, _sample_counts(probs, n, n_shots, stream)))
    return records


def marginal_counts(record: ShotRecord, keep: Iterable[int]) -> dict[str, int]:
    """Restrict a record's counts to the kept qubits (bit positions)."""
    n = record.n_qubits
    kept = sorted(set(int(q) for q in keep))
    if not kept:
        raise ValueError("keep must name at least one qubit")
    if kept[0] < 0 or kept[-1] >= n:
        raise ValueError(f"keep {kept} out of range for {n} qubits")
    out: dict[str, int] = {}
    for bits, count in record.counts.items():
        sub = "".join(bits[q] for q in kept)
        out[sub] = out.get(sub, 0) + count
    return out


def _hamming_transform(vec: np.ndarray) -> np.ndarray:
    """Apply the kron power of [[1, -1/2], [-1/2, 1]] to a length-2^k vector."""
    k = vec.size.bit_length() - 1
    out = vec.astype(float)
    for axis in range(k):
        view = out.reshape(1 << axis, 2, -1)
        a = view[:, 0, :].copy()
        b = view[:, 1, :]
        view[:, 0, :] = a - 0.5 * b
        view[:, 1, :] = b - 0.5 * a
    return out


def _count_vector(counts: dict[str, int]) -> np.ndarray:
    k = len(next(iter(counts)))
    vec = np.zeros(1 << k)
    for bits, count in counts.items():
        vec[int(bits, 2)] = count
    return vec


def purity_from_counts(counts: dict[str, int], unbiased: bool = True) -> float:
    """Single-setting purity statistic X from (already marginal) counts.

    With ``unbiased=True`` the diagonal uses c(c-1)/(N(N-1)); the biased
    variant divides the raw quadratic form by N^2 and overestimates purity
    noticeably at small shot counts (kept for sanity tests).
    """
    vec = _count_vector(counts)
    k = vec.size.bit_length() - 1
    total = vec.sum()
    quad = float(vec @ _hamming_transform(vec))
    if not unbiased:
        return (2.0**k) * quad / total**2
    if total < 2:
        raise ValueError("unbiased estimator needs at least 2 shots")
    return (2.0**k) * (quad - total) / (total * (total - 1.0))


def purity_from_probabilities(probs: np.ndarray) -> float:
    """Purity statistic X evaluated on exact outcome probabilities.

    Useful as a shot-noise-free contract: for the maximally mixed state on
    k qubits every setting gives exactly 2^(-k).
    """
    probs = np.asarray(probs, dtype=float)
    if probs.size & (probs.size - 1):
        raise ValueError("probability vector length must be a power of two")
    k = probs.size.bit_length() - 1
    return float((2.0**k) * (probs @ _hamming_transform(probs)))


def estimate_purity(
    records: Iterable[ShotRecord], keep: Iterable[int], unbiased: bool = True
) -> tuple[float, float]:
    """Estimate a subsystem purity and its standard error from shot records.

    Returns the mean of the per-setting statistics and its standard error
    (sample std over settings / sqrt(#settings)).  Estimates are reported
    unclipped: small budgets can legitimately yield values outside
    [2^-k, 1], and hiding that would distort downstream statistics.
    """
    records = list(records)
    if len(records) < 2:
        raise ValueError("need at least 2 settings to estimate purity")
    keep = list(keep)
    stats = [
        purity_from_counts(marginal_counts(record, keep), unbiased=unbiased)
        for record in records
    ]
    mean = float(np.mean(stats))
    stderr = float(np.std(stats, ddof=1) / math.sqrt(len(stats)))
    return mean, stderr


def write_records(records: Iterable[ShotRecord], path: Union[str, Path]) -> None:
    """Write shot records as JSON lines (one record per line)."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(
                json.dumps(
                    {
                        "setting": record.setting,
                        "n_shots": record.n_shots,
                        "counts": record.counts,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def read_records(path: Union[str, Path]) -> list[ShotRecord]:
    """Read shot records from a JSON-lines file written by write_records."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            raw = json.loads(line)
            records.append(
                ShotRecord(
                    setting=int(raw["setting"]),
                    n_shots=int(raw["n_shots"]),
                    counts={str(k): int(v) for k, v in raw["counts"].items()},
                )
            )
    return records
