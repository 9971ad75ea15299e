"""Exact purity statistics against independent rational oracles."""

from fractions import Fraction

import numpy as np
import pytest

from entanglebench.moments import (
    MAX_MOMENT_ORDER,
    BipartitionDims,
    EnsembleReport,
    exact_mean_purity,
    exact_variance_purity,
    purity_moment,
    relative_errors,
    two_qubit_purity_cdf,
)

# ---------------------------------------------------------------------------
# Polynomial helpers for the Schmidt-spectrum integral oracle (dim 2 x N).
# The single Schmidt weight x of a (2, N) random pure state has density
# proportional to (2x-1)^2 * (x(1-x))^(N-2) on [0, 1]; every purity moment
# is then an exact rational integral of (x^2 + (1-x)^2)^k against it.


def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _poly_pow(p, k):
    out = [Fraction(1)]
    for _ in range(k):
        out = _poly_mul(out, p)
    return out


def _poly_integral_01(p):
    return sum(c / (i + 1) for i, c in enumerate(p))


def _schmidt_moment_oracle(n_b: int, order: int) -> Fraction:
    """E[purity^order] for dims (2, n_b), by direct rational integration."""
    square = _poly_pow([Fraction(-1), Fraction(2)], 2)  # (2x - 1)^2
    weight = _poly_pow([Fraction(0), Fraction(1), Fraction(-1)], n_b - 2)
    density = _poly_mul(square, weight)
    purity = [Fraction(1), Fraction(-2), Fraction(2)]  # x^2 + (1-x)^2
    num = _poly_integral_01(_poly_mul(density, _poly_pow(purity, order)))
    den = _poly_integral_01(density)
    return num / den


# ---------------------------------------------------------------------------


def test_hand_checked_rationals():
    assert exact_mean_purity(BipartitionDims(2, 2)) == Fraction(4, 5)
    assert exact_variance_purity(BipartitionDims(2, 2)) == Fraction(3, 175)
    assert exact_mean_purity(BipartitionDims(4, 4)) == Fraction(8, 17)
    assert exact_variance_purity(BipartitionDims(4, 4)) == Fraction(25, 5491)
    assert exact_mean_purity(BipartitionDims(2, 32)) == Fraction(34, 65)
    assert exact_mean_purity(BipartitionDims(8, 8)) == Fraction(16, 65)


def test_dims_canonicalization_and_validation():
    assert BipartitionDims(8, 2) == BipartitionDims(2, 8)
    assert BipartitionDims(8, 2).n_a == 2
    assert BipartitionDims.from_qubits(6, 5) == BipartitionDims(2, 32)
    assert BipartitionDims(3, 5).total == 15
    with pytest.raises(ValueError):
        BipartitionDims(0, 4)
    with pytest.raises(ValueError):
        BipartitionDims.from_qubits(4, 4)
    with pytest.raises(ValueError):
        BipartitionDims.from_qubits(4, 0)


def test_moment_identities_all_small_power_of_two_dims():
    # order 1 must equal the closed-form mean and order 2 the closed-form
    # variance for every power-of-two bipartition with total dim <= 64
    for a_exp in range(1, 6):
        for b_exp in range(a_exp, 7 - a_exp):
            dims = BipartitionDims(1 << a_exp, 1 << b_exp)
            assert purity_moment(1, dims) == exact_mean_purity(dims), dims
            central = purity_moment(2, dims) - exact_mean_purity(dims) ** 2
            assert central == exact_variance_purity(dims), dims


def test_second_moment_of_two_qubit_state():
    assert purity_moment(2, BipartitionDims(2, 2)) == Fraction(23, 35)


@pytest.mark.parametrize("n_b", [2, 4, 8, 16])
@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_moments_match_schmidt_integral_oracle(n_b, order):
    dims = BipartitionDims(2, n_b)
    assert purity_moment(order, dims) == _schmidt_moment_oracle(n_b, order)


def test_moment_order_validation():
    dims = BipartitionDims(2, 2)
    with pytest.raises(ValueError):
        purity_moment(0, dims)
    with pytest.raises(ValueError):
        purity_moment(MAX_MOMENT_ORDER + 1, dims)


def test_variances_positive_and_shrinking():
    # variance decreases as the complementary side grows
    last = None
    for b_exp in range(1, 6):
        var = exact_variance_purity(BipartitionDims(2, 1 << b_exp))
        assert var > 0
        if last is not None:
            assert var < last
        last = var


def test_ensemble_report_from_samples():
    rng = np.random.default_rng(31)
    samples = {1: rng.uniform(0.5, 1.0, 50), 2: rng.uniform(0.3, 1.0, 50)}
    report = EnsembleReport.from_samples(3, "Direct", 20, 7, samples)
    assert report.ensemble == 50
    assert report.means[1] == pytest.approx(float(np.mean(samples[1])))
    assert report.variances[2] == pytest.approx(float(np.var(samples[2], ddof=1)))
    with pytest.raises(ValueError):
        EnsembleReport.from_samples(
            3, "Direct", 20, 7, {1: np.ones(5) * 0.5, 2: np.ones(6) * 0.5}
        )


def test_ensemble_report_validation():
    with pytest.raises(ValueError):
        EnsembleReport(2, "Direct", 20, 1, None, {1: 0.8})
    with pytest.raises(ValueError):
        EnsembleReport(2, "Direct", 20, 10, None, {1: 1.5})
    with pytest.raises(ValueError):
        EnsembleReport(2, "Direct", 20, 10, None, {1: 0.8}, {2: 0.01})


def test_relative_errors_requires_all_bipartitions():
    exact = {k: float(exact_mean_purity(BipartitionDims.from_qubits(4, k))) for k in (1, 2, 3)}
    report = EnsembleReport(
        4, "Direct", 20, 10, None, exact, {k: 1e-3 for k in exact}
    )
    delta_mu, _ = relative_errors(report)
    assert delta_mu == 0.0
    partial = EnsembleReport(4, "Direct", 20, 10, None, {1: 0.6}, {1: 1e-3})
    with pytest.raises(ValueError):
        relative_errors(partial)


def test_two_qubit_purity_cdf():
    assert two_qubit_purity_cdf(0.5) == 0.0
    assert two_qubit_purity_cdf(1.0) == pytest.approx(1.0)
    assert two_qubit_purity_cdf(0.75) == pytest.approx(0.5**1.5)
    with pytest.raises(ValueError):
        two_qubit_purity_cdf(0.4)
    with pytest.raises(ValueError):
        two_qubit_purity_cdf(1.1)
