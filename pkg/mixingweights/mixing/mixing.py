"""Inversion of the mixing-weights operators and the moment-based Mixing test.

A two-component mixture sample pairs observations X_1, ..., X_n with known weight rows
(ω_1(i), ω_2(i)). The operator Ω (n rows, 2 columns) is inverted through the matrix A
solving ^tΩ A = n I, whose columns turn weighted sums of the observations into unbiased
estimators of the component means.
"""
import logging
import math
from typing import Optional, Union

import numpy as np
from attrs import field, frozen

from mixingweights.gaussian.gaussian import Level, as_level, critical_value, two_sided_p_value
from mixingweights.parameters.parameters import TestProcedure
from mixingweights.utils.exceptions import ContractError, DegenerateVarianceError, SingularDesignError

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOLERANCE: float = 1e-12
RANK_TOLERANCE: float = 1e-10
LINDEBERG_WARNING: float = 0.1
COMPONENTS: tuple[int, int] = (1, 2)


def _readonly_array(values) -> np.ndarray:
    array = np.array(values, dtype=np.float64)
    array.setflags(write=False)
    return array


def check_component(l: int) -> int:
    """Returns l if it is a component label of a two-component mixture."""
    if l not in COMPONENTS:
        raise ContractError(f'component index must be 1 or 2, got {l!r}.')
    return int(l)


@frozen(eq=False)
class WeightsMatrix:
    """Mixing-weights operator Ω: one row (ω_1(i), ω_2(i)) per observation.

    Attributes
    ----------
    rows: numpy.ndarray
        Array of shape (n, 2), read-only. Each row is nonnegative and sums to one.

    Notes
    -----
    .. [1] Full rank is not enforced here so that singular designs can still be diagnosed;
       invert_weights refuses them.
    """
    rows: np.ndarray = field(converter=_readonly_array)

    @rows.validator
    def _check_rows(self, attribute, value):
        if value.ndim != 2 or value.shape[1] != 2:
            raise ContractError(f'weight rows must have shape (n, 2), got {value.shape}.')
        if value.shape[0] < 2:
            raise ContractError(f'a mixing-weights operator needs n >= 2 rows, got {value.shape[0]}.')
        if not np.all(np.isfinite(value)) or np.any(value < 0.0):
            raise ContractError('mixing-weights must be finite and nonnegative.')
        deviation = np.abs(value.sum(axis=1) - 1.0)
        if np.any(deviation > WEIGHT_SUM_TOLERANCE):
            row = int(np.argmax(deviation))
            raise ContractError(f'weight row {row} sums to {value[row].sum()!r}, not 1.')

    @classmethod
    def from_columns(cls, omega_1) -> 'WeightsMatrix':
        """Builds the operator from the first-component weights, ω_2 = 1 - ω_1."""
        omega_1 = np.asarray(omega_1, dtype=np.float64)
        return cls(np.column_stack((omega_1, 1.0 - omega_1)))

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    def omega(self, l: int) -> np.ndarray:
        """Column ω_l of the operator."""
        return self.rows[:, check_component(l) - 1]

    @property
    def gram(self) -> np.ndarray:
        """Gram matrix ^tΩΩ (2 x 2)."""
        return self.rows.T @ self.rows

    @property
    def determinant(self) -> float:
        g = self.gram
        return float(g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0])

    @property
    def is_full_rank(self) -> bool:
        return self.determinant / self.n ** 2 >= RANK_TOLERANCE


@frozen(eq=False)
class InversionMatrix:
    """Solution A of ^tΩ A = n I.

    Attributes
    ----------
    columns: numpy.ndarray
        Array of shape (n, 2); column l - 1 holds A^(l), the entries a_l(i).
    gram: numpy.ndarray
        Gram matrix ^tΩΩ of the inverted operator.
    determinant: float
        det(^tΩΩ).
    """
    columns: np.ndarray = field(converter=_readonly_array)
    gram: np.ndarray = field(converter=_readonly_array)
    determinant: float = field(converter=float)

    @property
    def n(self) -> int:
        return self.columns.shape[0]

    def column(self, l: int) -> np.ndarray:
        """Vector A^(l)."""
        return self.columns[:, check_component(l) - 1]


@frozen(eq=False)
class MixtureSample:
    """Observations paired with their mixing-weights operator.

    Attributes
    ----------
    values: numpy.ndarray
        Observed values, finite.
    weights: WeightsMatrix
        Operator with one row per observation.
    """
    values: np.ndarray = field(converter=_readonly_array)
    weights: WeightsMatrix

    def __attrs_post_init__(self):
        if self.values.ndim != 1 or self.values.shape[0] != self.weights.n:
            raise ContractError(f'{self.values.shape} values for {self.weights.n} weight rows.')
        if not np.all(np.isfinite(self.values)):
            raise ContractError('mixture sample values must be finite.')

    @property
    def n(self) -> int:
        return self.weights.n


@frozen
class ComponentMeanEstimates:
    """Moment estimates (m̂_1, m̂_2) of the component means."""
    m_hat: tuple[float, float] = field(converter=lambda pair: (float(pair[0]), float(pair[1])))

    @m_hat.validator
    def _check_finite(self, attribute, value):
        if not all(math.isfinite(m) for m in value):
            raise ContractError(f'component mean estimates must be finite, got {value}.')

    def component(self, l: int) -> float:
        return self.m_hat[check_component(l) - 1]


@frozen
class TestOutcome:
    """Result of a two-sided test of H_0: m_l = m'_l.

    Attributes
    ----------
    statistic: float
        Nonnegative test statistic.
    p_value: float
        Two-sided p-value against the standard normal law.
    reject: bool
        True when the statistic exceeds the critical value q_r (decision H_1).
    level: Level
        Type I error level r.
    component: int
        Tested component l.
    procedure: TestProcedure
        Procedure that produced the outcome.
    """
    __test__ = False

    statistic: float
    p_value: float
    reject: bool
    level: Level
    component: int
    procedure: TestProcedure

    @property
    def decision(self) -> str:
        return 'rejected' if self.reject else 'not rejected'


def outcome_from_statistic(statistic: float, level: Union[Level, float], component: int,
                           procedure: TestProcedure) -> TestOutcome:
    """Attaches the p-value and the decision at level r to a nonnegative statistic."""
    level = as_level(level)
    return TestOutcome(statistic=float(statistic),
                       p_value=two_sided_p_value(statistic),
                       reject=bool(statistic > critical_value(level)),
                       level=level,
                       component=component,
                       procedure=procedure)


def invert_weights(weights: WeightsMatrix) -> InversionMatrix:
    """This returns the matrix A with ^tΩ A = n I through the minors of ^tΩΩ.

    a_l(i) = n / det(^tΩΩ) * Σ_k (-1)^(l+k) γ_lk ω_k(i), where γ_lk is the (l, k) minor of
    the Gram matrix.

    Parameters
    ----------
    weights: WeightsMatrix
        Mixing-weights operator Ω.

    Returns
    -------
    InversionMatrix
        Columns A^(1), A^(2) together with the Gram matrix and its determinant.

    Raises
    ------
    SingularDesignError
        If det(^tΩΩ) / n^2 is below RANK_TOLERANCE.

    Examples
    --------
    >>> inv = invert_weights(WeightsMatrix([(0.9, 0.1), (0.1, 0.9)]))
    >>> [round(a, 12) for a in inv.column(1)]
    [2.25, -0.25]

    """
    n = weights.n
    gram = weights.gram
    determinant = float(gram[0, 0] * gram[1, 1] - gram[0, 1] * gram[1, 0])
    if determinant / n ** 2 < RANK_TOLERANCE:
        raise SingularDesignError(determinant=determinant, n=n)
    # for a 2 x 2 matrix the (l, k) minor is the entry left after deleting row l and column k
    minors = np.array([[gram[1, 1], gram[1, 0]],
                       [gram[0, 1], gram[0, 0]]])
    columns = np.empty((n, 2))
    for l in COMPONENTS:
        columns[:, l - 1] = sum((-1) ** (l + k) * minors[l - 1, k - 1] * weights.omega(k) for k in COMPONENTS)
    columns *= n / determinant
    logger.debug('inverted mixing-weights operator: n=%d, det=%.6g', n, determinant)
    return InversionMatrix(columns=columns, gram=gram, determinant=determinant)


def _check_inversion(sample: MixtureSample, inv: InversionMatrix) -> None:
    if inv.n != sample.n:
        raise ContractError(f'inversion matrix has {inv.n} rows for a sample of size {sample.n}.')


def estimate_means(sample: MixtureSample, inv: InversionMatrix) -> ComponentMeanEstimates:
    """This returns the moment estimates m̂_l = (1/n) Σ_i a_l(i) X_i, l = 1, 2.

    Parameters
    ----------
    sample: MixtureSample
        Observations and their operator.
    inv: InversionMatrix
        Inversion of sample.weights.

    Returns
    -------
    ComponentMeanEstimates

    Raises
    ------
    ContractError
        If inv and sample disagree in size.

    """
    _check_inversion(sample, inv)
    m_hat = inv.columns.T @ sample.values / sample.n
    return ComponentMeanEstimates((m_hat[0], m_hat[1]))


def estimate_variance_term(sample: MixtureSample, inv: InversionMatrix, means: ComponentMeanEstimates,
                           l: int) -> float:
    """This returns (1/n^2) Σ_i a_l^2(i) (X_i - ω_1(i) m̂_1 - ω_2(i) m̂_2)^2, the contribution of
    one sample to the estimated variance of m̂_l - m̂'_l.

    Parameters
    ----------
    sample: MixtureSample
    inv: InversionMatrix
        Inversion of sample.weights.
    means: ComponentMeanEstimates
        Estimates computed on sample.
    l: int
        Tested component.

    Returns
    -------
    float
        Nonnegative variance term.

    Notes
    -----
    .. [1] Residuals are centered on the fitted mixture mean ω_1(i) m̂_1 + ω_2(i) m̂_2 of each
       observation, both component estimates taking part.

    """
    _check_inversion(sample, inv)
    residuals = sample.values - sample.weights.rows @ np.asarray(means.m_hat)
    a_l = inv.column(l)
    return float(np.sum(a_l * a_l * residuals * residuals)) / sample.n ** 2


def _difference_and_variance(x: MixtureSample, y: MixtureSample, l: int,
                             inversions: Optional[tuple[InversionMatrix, InversionMatrix]]) -> tuple[float, float]:
    inv_x, inv_y = inversions if inversions is not None else (invert_weights(x.weights), invert_weights(y.weights))
    means_x = estimate_means(x, inv_x)
    means_y = estimate_means(y, inv_y)
    difference = means_x.component(l) - means_y.component(l)
    variance = estimate_variance_term(x, inv_x, means_x, l) + estimate_variance_term(y, inv_y, means_y, l)
    return difference, variance


def signed_mixing_statistic(x: MixtureSample, y: MixtureSample, l: int,
                            inversions: Optional[tuple[InversionMatrix, InversionMatrix]] = None) -> float:
    """This returns (m̂_l - m̂'_l) / sqrt(V̂_n^(l)), asymptotically standard normal under H_0.

    Raises
    ------
    DegenerateVarianceError
        If V̂_n^(l) = 0 while the estimates differ.

    """
    check_component(l)
    difference, variance = _difference_and_variance(x, y, l, inversions)
    if variance == 0.0:
        if difference == 0.0:
            return 0.0
        raise DegenerateVarianceError(f'estimated variance is zero for component {l} while the estimates '
                                      f'differ by {difference!r}.')
    return difference / math.sqrt(variance)


def mixing_test(x: MixtureSample, y: MixtureSample, l: int, level: Union[Level, float],
                inversions: Optional[tuple[InversionMatrix, InversionMatrix]] = None) -> TestOutcome:
    """This returns the outcome of the Mixing test of H_0: m_l = m'_l.

    T_m = |m̂_l - m̂'_l| / sqrt(V̂_n^(l)) with V̂_n^(l) the sum of the variance terms of both
    samples; H_0 is rejected when T_m > q_r.

    Parameters
    ----------
    x: MixtureSample
        First sample (size n).
    y: MixtureSample
        Second sample, independent of the first (size n', possibly different from n).
    l: int
        Tested component.
    level: Level or float
        Type I error level r.
    inversions: tuple of InversionMatrix, optional
        Precomputed inversions of x.weights and y.weights. Computed when omitted.

    Returns
    -------
    TestOutcome

    Raises
    ------
    SingularDesignError
        If either operator is not full rank.
    DegenerateVarianceError
        If V̂_n^(l) = 0 while the estimates differ.

    """
    statistic = abs(signed_mixing_statistic(x, y, l, inversions))
    return outcome_from_statistic(statistic, level, l, TestProcedure.MIXING)


def lindeberg_diagnostic(inv: InversionMatrix, l: int) -> float:
    """This returns sup_i a_l^2(i) / Σ_i a_l^2(i), in [1/n, 1].

    The asymptotic normality of T_m requires this ratio to vanish as n grows; values close
    to one flag a design far from the asymptotic regime.
    """
    squares = inv.column(l) ** 2
    ratio = float(squares.max() / squares.sum())
    if ratio > LINDEBERG_WARNING:
        logger.warning('Lindeberg ratio %.3g for component %d: n=%d is far from the asymptotic regime',
                       ratio, l, inv.n)
    return ratio


def min_eigenvalue_diagnostic(weights: WeightsMatrix) -> float:
    """This returns the smallest eigenvalue of the normalized Gram matrix (1/n) ^tΩΩ.

    The larger the value, the better conditioned the inversion and the more powerful the
    Mixing test. Zero for a rank-one operator.

    For the block design with alpha = beta this is (2 alpha - 1)**2 / 2, i.e. 0.125 at
    alpha = 0.75. The certainty index often quoted for that design, 0.3125 at 0.75, is the
    diagonal entry (1 - 2 alpha (1 - alpha)) / 2 of the same matrix rather than its smallest
    eigenvalue; simulation.harness.printed_lambda_min returns that quantity.
    """
    g = weights.gram / weights.n
    half_trace = 0.5 * (g[0, 0] + g[1, 1])
    radius = math.hypot(0.5 * (g[0, 0] - g[1, 1]), g[0, 1])
    return max(0.0, float(half_trace - radius))
