import math

import numpy as np
import pytest
import hypothesis.strategies as st
from hypothesis import HealthCheck, assume, given, settings
from hypothesis.extra.numpy import arrays

from mixingweights.mixing import (ComponentMeanEstimates, MixtureSample, WeightsMatrix, estimate_means,
                                  estimate_variance_term, invert_weights, lindeberg_diagnostic,
                                  min_eigenvalue_diagnostic, mixing_test, signed_mixing_statistic)
from mixingweights.gaussian import critical_value, two_sided_p_value
from mixingweights.parameters import TestProcedure
from mixingweights.simulation import block_weights
from mixingweights.utils import ContractError, DegenerateVarianceError, SingularDesignError

LABELED = WeightsMatrix([(1, 0), (1, 0), (0, 1), (0, 1)])
TWO_ROWS = WeightsMatrix([(0.9, 0.1), (0.1, 0.9)])
SMALL_ARRAY = 16
FILTERED_CHECKS = [HealthCheck.filter_too_much, HealthCheck.too_slow]


@st.composite
def full_rank_weights(draw, min_size=2, max_size=500, min_normalized_det=0.0):
    n = draw(st.integers(min_size, max_size))
    if n <= SMALL_ARRAY:
        omega_1 = draw(arrays(np.float64, n, elements=st.floats(0.0, 1.0)))
    else:
        # long operators come from a seeded generator, optionally pushed towards the extremes
        rng = np.random.default_rng(draw(st.integers(0, 2 ** 32 - 1)))
        omega_1 = rng.random(n) ** draw(st.sampled_from([0.25, 1.0, 4.0]))
    weights = WeightsMatrix.from_columns(omega_1)
    assume(weights.is_full_rank and weights.determinant / n ** 2 > min_normalized_det)
    return weights


@st.composite
def mixture_pairs(draw, min_size=4, max_size=8):
    samples = []
    for _ in range(2):
        weights = draw(full_rank_weights(min_size, max_size, min_normalized_det=1e-2))
        values = draw(arrays(np.float64, weights.n, elements=st.floats(-100.0, 100.0)))
        samples.append(MixtureSample(values, weights))
    return tuple(samples)


def brute_force(x, y, l):
    """Step-by-step evaluation of the Mixing statistic through a generic 2 x 2 solve.

    Returns the statistic and the variance estimate.
    """
    parts = []
    for sample in (x, y):
        omega = [[float(w) for w in row] for row in sample.weights.rows]
        n = len(omega)
        # ^tΩ A = n I solved as A = n Ω (^tΩΩ)^-1
        g = [[sum(omega[i][j] * omega[i][k] for i in range(n)) for k in range(2)] for j in range(2)]
        det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
        inverse = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]]
        a = [[n * (omega[i][0] * inverse[0][k] + omega[i][1] * inverse[1][k]) for k in range(2)] for i in range(n)]
        values = [float(v) for v in sample.values]
        m = [sum(a[i][k] * values[i] for i in range(n)) / n for k in range(2)]
        variance = sum(a[i][l - 1] ** 2 * (values[i] - omega[i][0] * m[0] - omega[i][1] * m[1]) ** 2
                       for i in range(n)) / n ** 2
        parts.append((m[l - 1], variance))
    (m_x, v_x), (m_y, v_y) = parts
    variance = v_x + v_y
    return (abs(m_x - m_y) / math.sqrt(variance) if variance else math.nan), variance


def well_posed(x, y, l):
    """Excludes near-perfect fits, where the variance estimate is rounding noise."""
    statistic, variance = brute_force(x, y, l)
    scale = 1.0 + max(np.abs(x.values).max(), np.abs(y.values).max())
    return math.isfinite(statistic) and variance > 1e-6 * scale ** 2 and statistic < 1e6


def test_weights_contract():
    with pytest.raises(ContractError):
        WeightsMatrix([(0.5, 0.5)])
    with pytest.raises(ContractError):
        WeightsMatrix([(0.5, 0.6), (0.5, 0.5)])
    with pytest.raises(ContractError):
        WeightsMatrix([(-0.1, 1.1), (0.5, 0.5)])
    with pytest.raises(ContractError):
        WeightsMatrix([(0.5, 0.5, 0.0), (0.5, 0.5, 0.0)])
    with pytest.raises(ContractError):
        WeightsMatrix([(math.nan, 1.0), (0.5, 0.5)])


def test_weights_are_read_only():
    with pytest.raises(ValueError):
        TWO_ROWS.rows[0, 0] = 0.0


def test_sample_length_must_match_the_operator():
    with pytest.raises(ContractError):
        MixtureSample([1.0, 2.0, 3.0], TWO_ROWS)
    with pytest.raises(ContractError):
        MixtureSample([1.0, math.inf], TWO_ROWS)


def test_inversion_of_a_labeled_design():
    inv = invert_weights(LABELED)
    np.testing.assert_allclose(inv.column(1), [2, 2, 0, 0], atol=1e-12)
    np.testing.assert_allclose(inv.column(2), [0, 0, 2, 2], atol=1e-12)


def test_inversion_of_two_rows():
    inv = invert_weights(TWO_ROWS)
    np.testing.assert_allclose(inv.column(1), [2.25, -0.25], rtol=1e-12)
    np.testing.assert_allclose(inv.column(2), [-0.25, 2.25], rtol=1e-12)
    assert float(TWO_ROWS.omega(1) @ inv.column(1)) == pytest.approx(2.0)
    assert float(TWO_ROWS.omega(2) @ inv.column(1)) == pytest.approx(0.0, abs=1e-12)


def test_singular_design():
    weights = WeightsMatrix(np.full((6, 2), 0.5))
    assert not weights.is_full_rank
    with pytest.raises(SingularDesignError) as excinfo:
        invert_weights(weights)
    assert excinfo.value.n == 6


@settings(max_examples=1000, deadline=None, suppress_health_check=FILTERED_CHECKS)
@given(full_rank_weights())
def test_inversion_identity(weights):
    inv = invert_weights(weights)
    residual = weights.rows.T @ inv.columns - weights.n * np.eye(2)
    scale = max(1.0, weights.n * weights.n / weights.determinant)
    assert np.max(np.abs(residual)) <= 1e-9 * scale


@settings(deadline=None, suppress_health_check=FILTERED_CHECKS)
@given(full_rank_weights(max_size=50, min_normalized_det=1e-6))
def test_inversion_matches_a_linear_solve(weights):
    solved = weights.rows @ np.linalg.solve(weights.gram, weights.n * np.eye(2))
    np.testing.assert_allclose(invert_weights(weights).columns, solved, rtol=1e-7, atol=1e-7 * np.abs(solved).max())


def test_means_of_a_labeled_design():
    means = estimate_means(MixtureSample([3, 5, 10, 20], LABELED), invert_weights(LABELED))
    assert means.component(1) == pytest.approx(4.0)
    assert means.component(2) == pytest.approx(15.0)


def test_means_of_two_rows():
    means = estimate_means(MixtureSample([1, 2], TWO_ROWS), invert_weights(TWO_ROWS))
    assert means.component(1) == pytest.approx(0.875)


@settings(deadline=None, suppress_health_check=FILTERED_CHECKS)
@given(full_rank_weights(max_size=100), st.floats(-1e3, 1e3))
def test_constant_values_give_constant_means(weights, c):
    means = estimate_means(MixtureSample(np.full(weights.n, c), weights), invert_weights(weights))
    scale = abs(c) * max(1.0, weights.n * weights.n / weights.determinant)
    assert means.component(1) == pytest.approx(c, abs=1e-9 * scale + 1e-12)
    assert means.component(2) == pytest.approx(c, abs=1e-9 * scale + 1e-12)


def test_means_reject_a_foreign_inversion():
    with pytest.raises(ContractError):
        estimate_means(MixtureSample([3, 5, 10, 20], LABELED), invert_weights(TWO_ROWS))


def test_variance_term_of_a_labeled_design():
    sample = MixtureSample([3, 5, 10, 20], LABELED)
    inv = invert_weights(LABELED)
    assert estimate_variance_term(sample, inv, estimate_means(sample, inv), 1) == pytest.approx(0.5)


def test_variance_term_without_residuals():
    inv = invert_weights(TWO_ROWS)
    means = ComponentMeanEstimates((1.0, 3.0))
    fitted = TWO_ROWS.rows @ np.array([1.0, 3.0])
    assert estimate_variance_term(MixtureSample(fitted, TWO_ROWS), inv, means, 1) == pytest.approx(0.0, abs=1e-24)


def test_identical_samples_are_not_rejected():
    x = MixtureSample([3, 5, 10, 20], WeightsMatrix([(0.8, 0.2), (0.7, 0.3), (0.2, 0.8), (0.1, 0.9)]))
    outcome = mixing_test(x, x, 1, 0.05)
    assert outcome.statistic == 0.0
    assert outcome.p_value == 1.0
    assert not outcome.reject
    assert outcome.decision == 'not rejected'
    assert outcome.procedure is TestProcedure.MIXING


def test_degenerate_variance():
    x = MixtureSample([1.0, 1.0, 1.0, 1.0], LABELED)
    y = MixtureSample([2.0, 2.0, 2.0, 2.0], LABELED)
    with pytest.raises(DegenerateVarianceError):
        mixing_test(x, y, 1, 0.05)
    assert signed_mixing_statistic(x, x, 1) == 0.0


def test_fixed_four_observation_pair():
    x = MixtureSample([1.0, 2.5, 4.0, 7.0], WeightsMatrix([(0.9, 0.1), (0.6, 0.4), (0.3, 0.7), (0.2, 0.8)]))
    y = MixtureSample([0.5, 3.0, 3.5, 9.0], WeightsMatrix([(0.8, 0.2), (0.7, 0.3), (0.4, 0.6), (0.1, 0.9)]))
    for l in (1, 2):
        outcome = mixing_test(x, y, l, 0.05)
        assert outcome.statistic == pytest.approx(brute_force(x, y, l)[0], rel=1e-10)
        assert outcome.p_value == pytest.approx(two_sided_p_value(outcome.statistic))
        assert outcome.reject == (outcome.statistic > critical_value(0.05))


@settings(max_examples=100, deadline=None, suppress_health_check=FILTERED_CHECKS)
@given(mixture_pairs(), st.sampled_from([1, 2]))
def test_statistic_matches_brute_force(pair, l):
    x, y = pair
    assume(well_posed(x, y, l))
    expected, _ = brute_force(x, y, l)
    assert mixing_test(x, y, l, 0.05).statistic == pytest.approx(expected, rel=1e-10, abs=1e-8)


def test_unequal_sample_sizes():
    x = MixtureSample([1.0, 2.5, 4.0, 7.0], WeightsMatrix([(0.9, 0.1), (0.6, 0.4), (0.3, 0.7), (0.2, 0.8)]))
    y = MixtureSample([0.5, 3.0, 9.0], WeightsMatrix([(0.8, 0.2), (0.5, 0.5), (0.1, 0.9)]))
    assert mixing_test(x, y, 1, 0.05).statistic == pytest.approx(brute_force(x, y, 1)[0], rel=1e-10)


@settings(deadline=None, suppress_health_check=FILTERED_CHECKS)
@given(mixture_pairs(min_size=6, max_size=16), st.floats(-50.0, 50.0), st.floats(0.1, 10.0))
def test_location_and_scale_equivariance(pair, shift, scale):
    x, y = pair
    assume(well_posed(x, y, 1))
    reference = signed_mixing_statistic(x, y, 1)

    def moved(sample, f):
        return MixtureSample(f(sample.values), sample.weights)

    shifted = signed_mixing_statistic(moved(x, lambda v: v + shift), moved(y, lambda v: v + shift), 1)
    scaled = signed_mixing_statistic(moved(x, lambda v: v * scale), moved(y, lambda v: v * scale), 1)
    assert scaled == pytest.approx(reference, rel=1e-8, abs=1e-8)
    assert shifted == pytest.approx(reference, rel=1e-6, abs=1e-6)


def test_lindeberg_ratios():
    assert lindeberg_diagnostic(invert_weights(LABELED), 1) == pytest.approx(0.5)
    assert lindeberg_diagnostic(invert_weights(TWO_ROWS), 1) == pytest.approx(2.25 ** 2 / (2.25 ** 2 + 0.25 ** 2))


@pytest.mark.parametrize('n', [100, 1000, 10000])
def test_lindeberg_ratio_of_block_designs(n):
    inv = invert_weights(WeightsMatrix(block_weights(n, 0.9, 0.9)))
    # two distinct entries, 2.25 and -0.25, each on half of the rows
    assert lindeberg_diagnostic(inv, 1) == pytest.approx(2.0 / n * 2.25 ** 2 / (2.25 ** 2 + 0.25 ** 2))


def test_min_eigenvalue():
    assert min_eigenvalue_diagnostic(LABELED) == pytest.approx(0.5)
    assert min_eigenvalue_diagnostic(WeightsMatrix(np.full((4, 2), 0.5))) == pytest.approx(0.0, abs=1e-15)
    assert min_eigenvalue_diagnostic(WeightsMatrix(block_weights(1000, 0.75, 0.75))) == pytest.approx(0.125)


@pytest.mark.parametrize('alpha', [0.6, 0.75, 0.9, 1.0])
def test_min_eigenvalue_of_block_designs_is_below_the_diagonal(alpha):
    weights = WeightsMatrix(block_weights(200, alpha, alpha))
    diagonal = 0.5 * (1.0 - 2.0 * alpha * (1.0 - alpha))
    assert (weights.gram / weights.n)[0, 0] == pytest.approx(diagonal)
    assert min_eigenvalue_diagnostic(weights) == pytest.approx(0.5 * (2.0 * alpha - 1.0) ** 2)
    assert min_eigenvalue_diagnostic(weights) <= diagonal


@settings(deadline=None, suppress_health_check=FILTERED_CHECKS)
@given(full_rank_weights(max_size=100))
def test_min_eigenvalue_matches_numpy(weights):
    expected = np.linalg.eigvalsh(weights.gram / weights.n)[0]
    assert min_eigenvalue_diagnostic(weights) == pytest.approx(max(expected, 0.0), abs=1e-12)
