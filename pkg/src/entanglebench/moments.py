"""Exact purity statistics of Haar-random bipartite pure states.

For a random pure state on a bipartite system of dimensions ``N_A x N_B``,
the subsystem purity R = Tr(rho_A^2) has known closed-form statistics.  This
module evaluates them in exact rational arithmetic (the factorial prefactors
underflow ordinary floats long before the interesting system sizes), plus
the ensemble summary containers and relative-error metrics used by the
convergence experiments.

The n-th moment is computed by expanding the permutation average over the
symmetric group S_{2n} into irreducible characters: writing N = N_A*N_B,

    <R^n> = (N-1)!/(N+2n-1)! * sum_{lam |- 2n} chi_lam(2^n)
            * prod_{cells (i,j) of lam} (N_A + j - i)(N_B + j - i) / hook(i,j)

where chi_lam(2^n) is the character of shape lam at the cycle type made of n
transpositions, evaluated with the Murnaghan-Nakayama rule.  The first two
moments reproduce the standard mean/variance formulas, which the test suite
checks for every power-of-two shape up to total dimension 64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache

import numpy as np

__all__ = [
    "BipartitionDims",
    "EnsembleReport",
    "exact_mean_purity",
    "exact_variance_purity",
    "purity_moment",
    "relative_errors",
    "two_qubit_purity_cdf",
]

MAX_MOMENT_ORDER = 4


@dataclass(frozen=True)
class BipartitionDims:
    """Subsystem dimensions of a bipartition, canonicalized so n_a <= n_b.

    Purity statistics are symmetric under swapping the two sides, so the
    constructor reorders the arguments.
    """

    n_a: int
    n_b: int

    def __post_init__(self) -> None:
        if self.n_a < 1 or self.n_b < 1:
            raise ValueError(f"dimensions must be >= 1, got ({self.n_a}, {self.n_b})")
        if self.n_a > self.n_b:
            a, b = self.n_a, self.n_b
            object.__setattr__(self, "n_a", b)
            object.__setattr__(self, "n_b", a)

    @classmethod
    def from_qubits(cls, n_qubits: int, n_sub: int) -> "BipartitionDims":
        """Dims of the (n_sub, n_qubits - n_sub) split of an n-qubit register."""
        if not 0 < n_sub < n_qubits:
            raise ValueError(f"n_sub must lie strictly between 0 and {n_qubits}")
        return cls(1 << n_sub, 1 << (n_qubits - n_sub))

    @property
    def total(self) -> int:
        return self.n_a * self.n_b


def exact_mean_purity(dims: BipartitionDims) -> Fraction:
    """Mean subsystem purity of a random pure state: (N_A+N_B)/(1+N_A*N_B)."""
    return Fraction(dims.n_a + dims.n_b, 1 + dims.total)


def exact_variance_purity(dims: BipartitionDims) -> Fraction:
    """Variance of the subsystem purity of a random pure state."""
    n = dims.total
    num = 2 * (dims.n_a**2 - 1) * (dims.n_b**2 - 1)
    return Fraction(num, (1 + n) ** 2 * (2 + n) * (3 + n))


# ---------------------------------------------------------------------------
# Character-sum evaluation of higher moments


@cache
def _partitions(total: int) -> tuple[tuple[int, ...], ...]:
    """All integer partitions of ``total`` as non-increasing tuples."""

    def rec(remaining: int, cap: int) -> list[tuple[int, ...]]:
        if remaining == 0:
            return [()]
        out = []
        for head in range(min(remaining, cap), 0, -1):
            out.extend((head, *tail) for tail in rec(remaining - head, head))
        return out

    return tuple(rec(total, total))


def _beta_numbers(shape: tuple[int, ...]) -> list[int]:
    """First-column hook lengths (strictly decreasing beta-set) of a shape."""
    rows = len(shape)
    return [shape[i] + (rows - 1 - i) for i in range(rows)]


def _shape_from_beta(beta: list[int]) -> tuple[int, ...]:
    beta = sorted(beta, reverse=True)
    rows = len(beta)
    shape = tuple(b - (rows - 1 - i) for i, b in enumerate(beta))
    return tuple(part for part in shape if part > 0)


@cache
def _char_at_transpositions(shape: tuple[int, ...], n_pairs: int) -> int:
    """Character chi^shape at the cycle type (2, 2, ..., 2) with n_pairs twos.

    Murnaghan-Nakayama on the beta-set: removing a border strip of length 2
    replaces a beta-number b (with b >= 2 and b-2 unoccupied) by b-2; the
    sign is (-1)^(number of beta-numbers strictly between b-2 and b).
    """
    if n_pairs == 0:
        return 1
    beta = _beta_numbers(shape)
    occupied = set(beta)
    total = 0
    for b in beta:
        if b < 2 or (b - 2) in occupied:
            continue
        height = sum(1 for x in beta if b - 2 < x < b)
        reduced = [x if x != b else b - 2 for x in beta]
        total += (-1) ** height * _char_at_transpositions(
            _shape_from_beta(reduced), n_pairs - 1
        )
    return total


def _hook_product(shape: tuple[int, ...]) -> int:
    cols = shape[0] if shape else 0
    conj = [sum(1 for part in shape if part > j) for j in range(cols)]
    out = 1
    for i, part in enumerate(shape):
        for j in range(part):
            out *= part - j + conj[j] - i - 1
    return out


def _content_product(shape: tuple[int, ...], x: int) -> int:
    out = 1
    for i, part in enumerate(shape):
        for j in range(part):
            out *= x + j - i
    return out


def purity_moment(order: int, dims: BipartitionDims) -> Fraction:
    """Exact n-th moment <R^n> of the subsystem purity, 1 <= n <= 4.

    Orders beyond 4 are rejected: the partition sum stays small but nothing
    downstream exercises them, and the supported range is part of the
    contract.  The order-1 and order-2 outputs are identical to
    :func:`exact_mean_purity` and the variance identity, which the tests
    verify for every power-of-two shape with total dimension <= 64.
    """
    if order < 1:
        raise ValueError(f"moment order must be >= 1, got {order}")
    if order > MAX_MOMENT_ORDER:
        raise ValueError(
            f"moment order {order} unsupported (max {MAX_MOMENT_ORDER})"
        )
    n = dims.total
    cells = 2 * order
    prefactor = Fraction(1, math.prod(range(n, n + cells)))
    total = Fraction(0)
    for shape in _partitions(cells):
        if len(shape) > dims.n_a:
            continue  # content factor vanishes: (n_a + j - i) hits zero
        weight = _content_product(shape, dims.n_a) * _content_product(shape, dims.n_b)
        if weight == 0:
            continue
        chi = _char_at_transpositions(shape, order)
        if chi == 0:
            continue
        total += Fraction(chi * weight, _hook_product(shape))
    return prefactor * total


# ---------------------------------------------------------------------------
# Ensemble summaries and convergence metrics


@dataclass(frozen=True)
class EnsembleReport:
    """Sample purity statistics of a generator ensemble, keyed by n_a.

    ``means``/``variances`` map the subsystem size n_a to the sample mean and
    unbiased sample variance over the ensemble members.
    """

    n_qubits: int
    method: str
    layers: int
    ensemble: int
    seed: int | None
    means: dict[int, float]
    variances: dict[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.ensemble < 2:
            raise ValueError("ensemble size must be >= 2 for sample variances")
        if self.variances and set(self.variances) != set(self.means):
            raise ValueError("means and variances must cover the same n_a keys")
        for n_sub, value in self.means.items():
            if not 0.0 < value <= 1.0 + 1e-9:
                raise ValueError(f"mean purity at n_a={n_sub} out of (0, 1]: {value}")

    @classmethod
    def from_samples(
        cls,
        n_qubits: int,
        method: str,
        layers: int,
        seed: int | None,
        samples: dict[int, np.ndarray],
    ) -> "EnsembleReport":
        """Summarize raw per-member purity samples (one array per n_a)."""
        sizes = {len(v) for v in samples.values()}
        if len(sizes) != 1:
            raise ValueError("all n_a entries must have the same ensemble size")
        (n_members,) = sizes
        means = {k: float(np.mean(v)) for k, v in samples.items()}
        variances = {k: float(np.var(v, ddof=1)) for k, v in samples.items()}
        return cls(n_qubits, method, layers, n_members, seed, means, variances)


def relative_errors(report: EnsembleReport) -> tuple[float, float]:
    """Averaged relative errors of ensemble means and variances vs. exact.

    Averages |sample - exact| / exact over n_a = 1 .. n-1 (the n_a = n case
    is excluded: tracing out nothing gives purity exactly 1), separately for
    the mean and the variance statistics.
    """
    n = report.n_qubits
    mean_terms = []
    var_terms = []
    for n_sub in range(1, n):
        if n_sub not in report.means or n_sub not in report.variances:
            raise ValueError(f"report is missing the n_a={n_sub} bipartition")
        dims = BipartitionDims.from_qubits(n, n_sub)
        mu = float(exact_mean_purity(dims))
        var = float(exact_variance_purity(dims))
        mean_terms.append(abs(report.means[n_sub] - mu) / mu)
        var_terms.append(abs(report.variances[n_sub] - var) / var)
    return float(np.mean(mean_terms)), float(np.mean(var_terms))


def two_qubit_purity_cdf(r: float) -> float:
    """CDF of the one-qubit reduced purity of a random two-qubit pure state.

    With Schmidt weight x distributed as 3(2x-1)^2 on [0,1], the purity
    R = x^2 + (1-x)^2 has P(R <= r) = (2r-1)^(3/2) on [1/2, 1].
    """
    if not 0.5 - 1e-12 <= r <= 1.0 + 1e-12:
        raise ValueError(f"purity of a 2x2 split lies in [1/2, 1], got {r}")
    return min(max(2.0 * r - 1.0, 0.0), 1.0) ** 1.5
