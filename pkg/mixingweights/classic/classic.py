"""Welch-type benchmarks: the Oracle test on true labels and the Expert test on
majority-weight pseudo-labels. Both compare against the standard normal critical value."""
import logging
import math
from typing import Union

import numpy as np
from attrs import field, frozen

from mixingweights.gaussian.gaussian import Level
from mixingweights.mixing.mixing import (MixtureSample, TestOutcome, WeightsMatrix, check_component,
                                         outcome_from_statistic)
from mixingweights.parameters.parameters import Population, TestProcedure
from mixingweights.utils.exceptions import ContractError, DegenerateVarianceError, NotAvailableError

logger = logging.getLogger(__name__)

EXPERT_THRESHOLD: float = 0.5


def _readonly(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


@frozen(eq=False)
class LabeledSample:
    """Observations with their true component labels.

    Attributes
    ----------
    values: numpy.ndarray
        Observed values.
    labels: numpy.ndarray
        Component label of each observation, 1 or 2.
    """
    values: np.ndarray = field(converter=lambda v: _readonly(v, np.float64))
    labels: np.ndarray = field(converter=lambda v: _readonly(v, np.int64))

    def __attrs_post_init__(self):
        if self.values.ndim != 1 or self.values.shape != self.labels.shape:
            raise ContractError(f'{self.values.shape} values for {self.labels.shape} labels.')
        if not np.all(np.isin(self.labels, (1, 2))):
            raise ContractError('labels must be 1 or 2.')

    @property
    def n(self) -> int:
        return self.values.shape[0]


@frozen
class SubgroupStats:
    """Size, mean and variance (denominator n_l) of the observations carrying one label.

    Attributes
    ----------
    count: int
        n_l, zero for an empty subgroup.
    mean: float
        Subgroup mean, NaN when empty.
    variance: float
        Biased subgroup variance (1/n_l normalization), NaN when empty.
    """
    count: int
    mean: float
    variance: float

    @property
    def empty(self) -> bool:
        return self.count == 0


def values_stats(values: np.ndarray) -> SubgroupStats:
    """Count, mean and 1/n variance of a vector of values (empty when the vector is)."""
    count = int(values.shape[0])
    if count == 0:
        return SubgroupStats(count=0, mean=math.nan, variance=math.nan)
    mean = float(values.mean())
    variance = float(np.mean((values - mean) ** 2))
    return SubgroupStats(count=count, mean=mean, variance=variance)


def subgroup_stats(sample: LabeledSample, l: int) -> SubgroupStats:
    """This returns n_l, the mean and the 1/n_l variance of the observations labeled l.

    Parameters
    ----------
    sample: LabeledSample
    l: int
        Component label.

    Returns
    -------
    SubgroupStats
        Flagged empty when no observation carries label l.

    Examples
    --------
    >>> subgroup_stats(LabeledSample([3, 5, 10, 20], [1, 1, 2, 2]), 1)
    SubgroupStats(count=2, mean=4.0, variance=1.0)

    """
    return values_stats(sample.values[sample.labels == check_component(l)])


def welch_outcome(stats_x: SubgroupStats, stats_y: SubgroupStats, l: int, level: Union[Level, float],
                  procedure: TestProcedure) -> TestOutcome:
    """This returns the outcome of the Welch-type statistic
    |mean_x - mean_y| / sqrt(var_x / n_x + var_y / n_y) compared with q_r.

    Raises
    ------
    NotAvailableError
        If either subgroup is empty.
    DegenerateVarianceError
        If both variances vanish while the means differ.

    """
    for stats, population in ((stats_x, Population.FIRST), (stats_y, Population.SECOND)):
        if stats.empty:
            raise NotAvailableError(component=l, population=str(population), procedure=str(procedure))
    pooled = stats_x.variance / stats_x.count + stats_y.variance / stats_y.count
    difference = stats_x.mean - stats_y.mean
    if pooled == 0.0:
        if difference != 0.0:
            raise DegenerateVarianceError(f'{procedure} test: both subgroups are constant with different means.')
        statistic = 0.0
    else:
        statistic = abs(difference) / math.sqrt(pooled)
    return outcome_from_statistic(statistic, level, l, procedure)


def oracle_test(x: LabeledSample, y: LabeledSample, l: int, level: Union[Level, float]) -> TestOutcome:
    """This returns the outcome of the Oracle test, the Welch-type test on true labels.

    Parameters
    ----------
    x: LabeledSample
        First sample.
    y: LabeledSample
        Second sample.
    l: int
        Tested component.
    level: Level or float
        Type I error level r.

    Returns
    -------
    TestOutcome

    Raises
    ------
    NotAvailableError
        If no observation of a sample carries label l.
    DegenerateVarianceError
        If the pooled variance term is zero while the subgroup means differ.

    """
    return welch_outcome(subgroup_stats(x, l), subgroup_stats(y, l), l, level, TestProcedure.ORACLE)


def expert_labels(weights: WeightsMatrix, l: int) -> np.ndarray:
    """This returns the boolean mask ω_l(i) >= 1/2 of the observations the expert allocates to l.

    An observation with ω_1(i) = ω_2(i) = 1/2 is allocated to both components.
    """
    return weights.omega(l) >= EXPERT_THRESHOLD


def expert_subsample(sample: MixtureSample, l: int) -> np.ndarray:
    """Values of the observations the expert allocates to component l."""
    return sample.values[expert_labels(sample.weights, l)]


def expert_test(x: MixtureSample, y: MixtureSample, l: int, level: Union[Level, float]) -> TestOutcome:
    """This returns the outcome of the Expert test, the Welch-type test on the observations
    whose weight for component l is at least one half.

    Parameters
    ----------
    x: MixtureSample
        First sample.
    y: MixtureSample
        Second sample.
    l: int
        Tested component.
    level: Level or float
        Type I error level r.

    Returns
    -------
    TestOutcome

    Raises
    ------
    NotAvailableError
        If no weight of a sample reaches one half for component l.

    """
    stats_x = values_stats(expert_subsample(x, l))
    stats_y = values_stats(expert_subsample(y, l))
    return welch_outcome(stats_x, stats_y, l, level, TestProcedure.EXPERT)
