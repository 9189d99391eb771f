import asyncio
import logging
import math
from typing import Iterable, Optional, Union

import numpy as np
from attrs import evolve, field, frozen

from mixingweights.classic.classic import LabeledSample, expert_labels, oracle_test, values_stats, welch_outcome
from mixingweights.gaussian.gaussian import Level, as_level
from mixingweights.mixing.mixing import (InversionMatrix, MixtureSample, WeightsMatrix, check_component,
                                         invert_weights, outcome_from_statistic, signed_mixing_statistic)
from mixingweights.parameters.parameters import TablePreset, TestProcedure
from mixingweights.utils.exceptions import (ConfigurationError, DegenerateVarianceError, NotAvailableError,
                                            NumericalError)
from mixingweights.utils.utils import compute_chunks, format_cell, parse_cell

logger = logging.getLogger(__name__)

PAPER_REPETITIONS: int = 40_000
DEFAULT_REPETITIONS: int = 10_000
DEFAULT_SIMULATION_LEVEL: float = 0.05
_SEED_LIMIT: int = 2 ** 64
_FIRST_SAMPLE: int = 0
_SECOND_SAMPLE: int = 1


def _finite(instance, attribute, value):
    if not math.isfinite(value):
        raise ConfigurationError(f'{attribute.name} must be finite, got {value!r}.')


def _positive(instance, attribute, value):
    if not (math.isfinite(value) and value > 0.0):
        raise ConfigurationError(f'{attribute.name} must be positive, got {value!r}.')


def _unit_interval(instance, attribute, value):
    if not 0.0 <= value <= 1.0:
        raise ConfigurationError(f'{attribute.name} must lie in [0, 1], got {value!r}.')


@frozen
class ComponentParams:
    """Gaussian component N(m, sigma^2) of a mixture."""
    m: float = field(converter=float, validator=_finite)
    sigma: float = field(converter=float, validator=_positive)


@frozen
class BlockDesign:
    """Two-block weight structure: the first n/2 rows are (alpha, 1 - alpha), the last n/2
    rows are (1 - beta, beta).

    Attributes
    ----------
    n: int
        Even sample size.
    alpha: float
        Weight of component 1 on the first block.
    beta: float
        Weight of component 2 on the second block; alpha + beta != 1 for a full rank operator.
    """
    n: int = field(converter=int)
    alpha: float = field(converter=float, validator=_unit_interval)
    beta: float = field(converter=float, validator=_unit_interval)

    def __attrs_post_init__(self):
        if self.n < 2 or self.n % 2:
            raise ConfigurationError(f'block designs need an even sample size n >= 2, got {self.n}.')
        if abs(self.alpha + self.beta - 1.0) < 1e-12:
            raise ConfigurationError(f'alpha + beta = 1 ({self.alpha} + {self.beta}) gives a rank-one operator.')

    def weights(self) -> WeightsMatrix:
        return WeightsMatrix(block_weights(self.n, self.alpha, self.beta))


def block_weights(n: int, alpha: float, beta: float) -> np.ndarray:
    """Weight rows of the two-block structure, without any rank check."""
    half = n // 2
    rows = np.empty((n, 2))
    rows[:half] = (alpha, 1.0 - alpha)
    rows[half:] = (1.0 - beta, beta)
    return rows


def _as_components(pair) -> tuple[ComponentParams, ComponentParams]:
    first, second = pair
    return (first if isinstance(first, ComponentParams) else ComponentParams(*first),
            second if isinstance(second, ComponentParams) else ComponentParams(*second))


def _as_procedures(tests) -> tuple[TestProcedure, ...]:
    if isinstance(tests, (str, TestProcedure)):
        tests = [tests]
    requested = {TestProcedure.parse(t) for t in tests}
    if not requested:
        raise ConfigurationError('at least one test is required.')
    return tuple(p for p in TestProcedure if p in requested)


def _check_repetitions(instance, attribute, value):
    if value < 1:
        raise ConfigurationError(f'repetitions must be >= 1, got {value}.')


def _check_seed(instance, attribute, value):
    if not 0 <= value < _SEED_LIMIT:
        raise ConfigurationError(f'seed must be a 64-bit unsigned integer, got {value}.')


@frozen
class ExperimentConfig:
    """A complete Monte Carlo scenario.

    Attributes
    ----------
    design_x, design_y: BlockDesign
        Weight structures of the two samples.
    components_x, components_y: tuple of ComponentParams
        (component 1, component 2) of each population.
    tested_component: int
        Component l of the hypothesis m_l = m'_l.
    level: Level
        Type I error level r.
    repetitions: int
        Number R of independent repetitions.
    seed: int
        Master seed, 64-bit unsigned.
    tests: tuple of TestProcedure
        Procedures applied in every repetition.
    table, cell: str
        Labels echoed in the report rows.
    """
    design_x: BlockDesign
    design_y: BlockDesign
    components_x: tuple[ComponentParams, ComponentParams] = field(converter=_as_components)
    components_y: tuple[ComponentParams, ComponentParams] = field(converter=_as_components)
    tested_component: int = field(default=1, converter=int)
    level: Level = field(default=DEFAULT_SIMULATION_LEVEL, converter=as_level)
    repetitions: int = field(default=DEFAULT_REPETITIONS, converter=int, validator=_check_repetitions)
    seed: int = field(default=0, converter=int, validator=_check_seed)
    tests: tuple[TestProcedure, ...] = field(default=tuple(TestProcedure), converter=_as_procedures)
    table: str = field(default='custom', converter=str)
    cell: str = field(default='-', converter=str)

    def __attrs_post_init__(self):
        try:
            check_component(self.tested_component)
        except ValueError as error:
            raise ConfigurationError(str(error)) from None

    def with_run(self, repetitions: Optional[int] = None, seed: Optional[int] = None) -> 'ExperimentConfig':
        """Copy with another repetition count and/or seed."""
        return evolve(self,
                      repetitions=self.repetitions if repetitions is None else repetitions,
                      seed=self.seed if seed is None else seed)


@frozen
class TestTally:
    """Rejections and not-available outcomes of one procedure over an experiment."""
    __test__ = False

    procedure: TestProcedure
    rejections: int
    not_available: int
    repetitions: int

    @property
    def used(self) -> int:
        """Repetitions in which the test could be computed."""
        return self.repetitions - self.not_available

    @property
    def rejection_rate(self) -> float:
        return self.rejections / self.used if self.used else 0.0

    @property
    def mc_standard_error(self) -> float:
        if not self.used:
            return 0.0
        p = self.rejection_rate
        return math.sqrt(p * (1.0 - p) / self.used)


@frozen
class ExperimentReport:
    """Estimated rejection rates of an experiment, with the seed echoed back."""
    table: str
    cell: str
    seed: int
    repetitions: int
    tallies: tuple[TestTally, ...]

    def tally(self, procedure: Union[TestProcedure, str]) -> TestTally:
        procedure = TestProcedure.parse(procedure)
        for tally in self.tallies:
            if tally.procedure is procedure:
                return tally
        raise KeyError(f'test {procedure} was not run in this experiment.')

    def rejection_rate(self, procedure: Union[TestProcedure, str]) -> float:
        return self.tally(procedure).rejection_rate

    def to_rows(self) -> list[dict]:
        """Report rows: table, cell, test, rate, se, reps, seed (reps counts the repetitions used)."""
        return [{'table': self.table, 'cell': self.cell, 'test': str(t.procedure), 'rate': t.rejection_rate,
                 'se': t.mc_standard_error, 'reps': t.used, 'seed': self.seed} for t in self.tallies]


def substream(seed: int, repetition: int, sample: int) -> np.random.Generator:
    """This returns the random stream of one sample of one repetition.

    Streams are Philox counter-based generators keyed by a SeedSequence whose spawn key is
    (repetition, sample), so every stream depends only on the master seed and its own
    coordinates, never on the order in which repetitions are executed. Gaussian variates are
    drawn with numpy's ziggurat method (Generator.normal).
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(repetition, sample))))


def draw_mixture(weights: WeightsMatrix, components: tuple[ComponentParams, ComponentParams],
                 stream: np.random.Generator) -> tuple[MixtureSample, LabeledSample]:
    """Draws one observation per weight row: latent label first, then the Gaussian value."""
    labels = np.where(stream.random(weights.n) < weights.omega(1), 1, 2)
    means = np.array([c.m for c in components])
    sigmas = np.array([c.sigma for c in components])
    values = stream.normal(means[labels - 1], sigmas[labels - 1])
    return MixtureSample(values, weights), LabeledSample(values, labels)


def sample_mixture(design: BlockDesign, components: tuple[ComponentParams, ComponentParams],
                   stream: np.random.Generator) -> tuple[MixtureSample, LabeledSample]:
    """This returns one sample drawn from the mixture model.

    For each observation a latent label is drawn with the probabilities of its weight row,
    then the value is drawn from the Gaussian component carrying that label.

    Parameters
    ----------
    design: BlockDesign
        Weight structure.
    components: tuple of ComponentParams
        (component 1, component 2).
    stream: numpy.random.Generator
        Random stream, consumed by the call.

    Returns
    -------
    tuple
        The weight-only view (for the Expert and Mixing tests) and the labeled view (for the
        Oracle test) of the same observations.

    """
    return draw_mixture(design.weights(), _as_components(components), stream)


def mixture_variance(weights: WeightsMatrix, components: tuple[ComponentParams, ComponentParams]) -> np.ndarray:
    """This returns the exact variance of every observation,
    ω_1 σ_1^2 + ω_2 σ_2^2 + ω_1 ω_2 (m_1 - m_2)^2."""
    first, second = _as_components(components)
    omega_1, omega_2 = weights.omega(1), weights.omega(2)
    return omega_1 * first.sigma ** 2 + omega_2 * second.sigma ** 2 + omega_1 * omega_2 * (first.m - second.m) ** 2


def printed_lambda_min(alpha: float, alpha_prime: float) -> float:
    """Certainty index ½(1 - 2 a (1 - a)) with a = min(alpha, alpha').

    For the two-block structure with alpha = beta this is the diagonal entry of the
    normalized Gram matrix; min_eigenvalue_diagnostic gives the exact smallest eigenvalue.
    """
    a = min(alpha, alpha_prime)
    return 0.5 * (1.0 - 2.0 * a * (1.0 - a))


@frozen(eq=False)
class _Plan:
    """Everything a repetition needs that does not depend on the random draws."""
    config: ExperimentConfig
    weights_x: WeightsMatrix
    weights_y: WeightsMatrix
    inversions: Optional[tuple[InversionMatrix, InversionMatrix]]
    expert_masks: tuple[np.ndarray, np.ndarray]


def _plan(config: ExperimentConfig) -> _Plan:
    weights_x, weights_y = config.design_x.weights(), config.design_y.weights()
    inversions = None
    if TestProcedure.MIXING in config.tests:
        inversions = (invert_weights(weights_x), invert_weights(weights_y))
    l = config.tested_component
    return _Plan(config=config, weights_x=weights_x, weights_y=weights_y, inversions=inversions,
                 expert_masks=(expert_labels(weights_x, l), expert_labels(weights_y, l)))


def _draw_pair(plan: _Plan, repetition: int):
    config = plan.config
    x = draw_mixture(plan.weights_x, config.components_x, substream(config.seed, repetition, _FIRST_SAMPLE))
    y = draw_mixture(plan.weights_y, config.components_y, substream(config.seed, repetition, _SECOND_SAMPLE))
    return x, y


def _run_repetition(plan: _Plan, repetition: int) -> dict[TestProcedure, Optional[bool]]:
    """Decisions of every requested test in one repetition, None when not available."""
    config = plan.config
    l, level = config.tested_component, config.level
    (mixture_x, labeled_x), (mixture_y, labeled_y) = _draw_pair(plan, repetition)
    decisions: dict[TestProcedure, Optional[bool]] = {}
    for procedure in config.tests:
        try:
            if procedure is TestProcedure.ORACLE:
                outcome = oracle_test(labeled_x, labeled_y, l, level)
            elif procedure is TestProcedure.EXPERT:
                outcome = welch_outcome(values_stats(mixture_x.values[plan.expert_masks[0]]),
                                        values_stats(mixture_y.values[plan.expert_masks[1]]),
                                        l, level, procedure)
            else:
                statistic = signed_mixing_statistic(mixture_x, mixture_y, l, plan.inversions)
                outcome = outcome_from_statistic(abs(statistic), level, l, procedure)
            decisions[procedure] = outcome.reject
        except (NotAvailableError, DegenerateVarianceError):
            decisions[procedure] = None
    return decisions


def _count(plan: _Plan, repetitions: Iterable[int]) -> dict[TestProcedure, list[int]]:
    """Pure reduction over a set of repetitions: [rejections, not available] per test."""
    counts = {procedure: [0, 0] for procedure in plan.config.tests}
    for repetition in repetitions:
        for procedure, decision in _run_repetition(plan, repetition).items():
            if decision is None:
                counts[procedure][1] += 1
            elif decision:
                counts[procedure][0] += 1
    return counts


def _report(config: ExperimentConfig, partial_counts: Iterable[dict[TestProcedure, list[int]]]) -> ExperimentReport:
    totals = {procedure: [0, 0] for procedure in config.tests}
    for counts in partial_counts:
        for procedure, (rejections, not_available) in counts.items():
            totals[procedure][0] += rejections
            totals[procedure][1] += not_available
    tallies = tuple(TestTally(procedure=p, rejections=r, not_available=na, repetitions=config.repetitions)
                    for p, (r, na) in totals.items())
    for tally in tallies:
        if tally.not_available:
            logger.warning('%s test non-available in %d of %d repetitions', tally.procedure, tally.not_available,
                           tally.repetitions)
    logger.info('experiment table=%s cell=%s finished: %s', config.table, config.cell,
                ', '.join(f'{t.procedure} {t.rejection_rate:.4f}' for t in tallies))
    return ExperimentReport(table=config.table, cell=config.cell, seed=config.seed,
                            repetitions=config.repetitions, tallies=tallies)


class ExperimentRunner:
    """The ExperimentRunner executes Monte Carlo experiments, either serially or with chunks of
    repetitions dispatched concurrently to worker threads.

    Attributes
    ----------
    chunk_size: int
        Number of repetitions handled by one task.

    Methods
    -------
    run(config) -> ExperimentReport
        Runs every repetition in the calling thread.

    async_run(config) -> ExperimentReport
        Runs chunks of repetitions concurrently; the report equals the serial one.

    Notes
    -----
    .. [1] Every repetition draws from its own substreams (see substream), and the report is a
       sum of counts, so the execution order never changes the result.

    """

    def __init__(self, chunk_size: int = 500, maximum_concurrent_number: int = 4):
        if chunk_size < 1:
            raise ConfigurationError(f'chunk size must be positive, got {chunk_size}.')
        self._chunk_size: int = chunk_size
        self._MAXIMUM_CONCURRENT_NUMBER: int = 1
        self.maximum_concurrent_number = maximum_concurrent_number

    @property
    def chunk_size(self) -> int:
        return self._chunk_size

    @property
    def maximum_concurrent_number(self) -> int:
        """This returns the maximum number of chunks processed at the same time.

        Returns
        -------
        int
            Maximum number of concurrent tasks.

        """
        return self._MAXIMUM_CONCURRENT_NUMBER

    @maximum_concurrent_number.setter
    def maximum_concurrent_number(self, concurrent_number: int) -> None:
        """Set the maximum number of concurrent tasks.

        Raises
        ------
        ConfigurationError
            If the number is not positive.

        """
        if concurrent_number < 1:
            raise ConfigurationError(f'the maximum number of concurrent tasks cannot be {concurrent_number}.')
        self._MAXIMUM_CONCURRENT_NUMBER = concurrent_number

    def run(self, config: ExperimentConfig) -> ExperimentReport:
        """This returns the report of config, computed in the calling thread."""
        logger.info('experiment table=%s cell=%s: %d repetitions, seed %d', config.table, config.cell,
                    config.repetitions, config.seed)
        plan = _plan(config)
        return _report(config, [_count(plan, range(config.repetitions))])

    async def _asynchronous_run(self, config: ExperimentConfig) -> ExperimentReport:
        plan = _plan(config)
        chunks = list(compute_chunks(config.repetitions, self._chunk_size))
        partial_counts: list[dict] = []
        for start in range(0, len(chunks), self._MAXIMUM_CONCURRENT_NUMBER):
            tasks = [asyncio.to_thread(_count, plan, chunk)
                     for chunk in chunks[start:start + self._MAXIMUM_CONCURRENT_NUMBER]]
            partial_counts.extend(await asyncio.gather(*tasks))
        return _report(config, partial_counts)

    def async_run(self, config: ExperimentConfig) -> ExperimentReport:
        """This returns the report of config, chunks of repetitions running concurrently.

        Notes
        -----
        .. [1] The asyncio.run() function runs the top-level coroutine, so this method must not be
           called from a running event loop.

        """
        logger.info('experiment table=%s cell=%s: %d repetitions, seed %d, %d concurrent chunks of %d',
                    config.table, config.cell, config.repetitions, config.seed,
                    self._MAXIMUM_CONCURRENT_NUMBER, self._chunk_size)
        return asyncio.run(self._asynchronous_run(config))


def run_experiment(config: ExperimentConfig, concurrent: bool = False) -> ExperimentReport:
    """This returns the estimated rejection rates of every requested test.

    Parameters
    ----------
    config: ExperimentConfig
    concurrent: bool, optional
        Dispatch chunks of repetitions to worker threads. The report is identical either way.

    Returns
    -------
    ExperimentReport
        Not-available outcomes are tallied per test, never raised.

    """
    runner = ExperimentRunner()
    return runner.async_run(config) if concurrent else runner.run(config)


def collect_mixing_statistics(config: ExperimentConfig) -> np.ndarray:
    """This returns the signed Mixing statistic (m̂_l - m̂'_l) / sqrt(V̂) of every repetition,
    NaN where the variance degenerates."""
    plan = _plan(evolve(config, tests=(TestProcedure.MIXING,)))
    statistics = np.empty(config.repetitions)
    for repetition in range(config.repetitions):
        (x, _), (y, _) = _draw_pair(plan, repetition)
        try:
            statistics[repetition] = signed_mixing_statistic(x, y, config.tested_component, plan.inversions)
        except NumericalError:
            statistics[repetition] = math.nan
    return statistics


# --------------------------------------------------------------
# Published scenarios
# --------------------------------------------------------------

_TABLE_GRIDS: dict[TablePreset, dict[str, tuple[float, ...]]] = {
    TablePreset.WRONG_DECISIONS_EXPERT: {'delta': (0.5, 1, 2, 3), 'n': (100, 200, 500, 1000, 2000)},
    TablePreset.CORRECT_DECISIONS_MIXING: {'n': (500, 1000, 2000, 3000, 4000, 5000, 6000)},
    TablePreset.POWER_ORACLE_MIXING: {'n': (500, 1000, 2000, 3000, 4000, 5000, 6000)},
    TablePreset.POWER_BY_CERTAINTY: {'alpha': (0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 1),
                                     'delta': (0.1, 0.2, 0.3, 0.4)},
    TablePreset.POWER_BY_WEIGHT_PAIR: {'alpha': (0.9, 0.8, 0.75), 'alpha_prime': (0.6, 0.7, 0.75),
                                       'n': (100, 200, 500)},
}

_TABLE_TESTS: dict[TablePreset, tuple[TestProcedure, ...]] = {
    TablePreset.WRONG_DECISIONS_EXPERT: (TestProcedure.EXPERT, TestProcedure.MIXING),
    TablePreset.CORRECT_DECISIONS_MIXING: (TestProcedure.EXPERT, TestProcedure.MIXING),
    TablePreset.POWER_ORACLE_MIXING: (TestProcedure.ORACLE, TestProcedure.MIXING),
    TablePreset.POWER_BY_CERTAINTY: (TestProcedure.MIXING,),
    TablePreset.POWER_BY_WEIGHT_PAIR: (TestProcedure.MIXING,),
}

_WEIGHT_PAIRS: tuple[tuple[float, float], ...] = ((0.9, 0.6), (0.8, 0.7), (0.75, 0.75))
_POWER_TABLE_N: int = 1000
_UNIT_SIGMA: float = 1.0


def _lookup(grid: tuple[float, ...], key: str, value: float, preset: TablePreset) -> float:
    for candidate in grid:
        if abs(candidate - value) < 1e-9:
            return float(candidate)
    raise ConfigurationError(f'table {preset} has no cell with {key}={value:g}; available: '
                             f'{", ".join(f"{g:g}" for g in grid)}.')


def _table_preset(table_id: Union[TablePreset, int, str]) -> TablePreset:
    return TablePreset.parse(table_id)


def table_config(table_id: Union[TablePreset, int, str], cell: Union[str, dict[str, float]],
                 repetitions: int = DEFAULT_REPETITIONS, seed: int = 0) -> ExperimentConfig:
    """This returns the exact scenario of one published table cell.

    All components have unit standard deviation, the level is 0.05 and the first component
    is tested.

    Parameters
    ----------
    table_id: TablePreset or int
        Table number, 1 to 5.
    cell: str or dict
        Cell selector, e.g. 'delta=1,n=2000' (table 1), 'n=2000' (tables 2, 3),
        'alpha=0.75,delta=0.3' (table 4), 'alpha=0.75,alpha_prime=0.75,n=500' (table 5).
    repetitions: int, optional
        Number of repetitions, DEFAULT_REPETITIONS unless given (PAPER_REPETITIONS reproduces
        the published precision).
    seed: int, optional
        Master seed.

    Returns
    -------
    ExperimentConfig

    Raises
    ------
    ConfigurationError
        If the table or the cell does not exist.

    """
    preset = _table_preset(table_id)
    selector = parse_cell(cell) if isinstance(cell, str) else {k: float(v) for k, v in cell.items()}
    grid = _TABLE_GRIDS[preset]
    if set(selector) != set(grid):
        raise ConfigurationError(f'table {preset} cells are selected by {", ".join(sorted(grid))}; '
                                 f'got {", ".join(sorted(selector)) or "nothing"}.')
    values = {key: _lookup(grid[key], key, selector[key], preset) for key in grid}
    unit = _UNIT_SIGMA

    if preset is TablePreset.WRONG_DECISIONS_EXPERT:
        n, alpha = int(values['n']), 0.9
        components_x = ((0.0, unit), (1.0, unit))
        components_y = ((0.0, unit), (1.0 + values['delta'], unit))
        alpha_x = alpha_y = alpha
    elif preset in (TablePreset.CORRECT_DECISIONS_MIXING, TablePreset.POWER_ORACLE_MIXING):
        n, alpha = int(values['n']), 0.9
        components_x = ((0.0, unit), (1.0, unit))
        components_y = ((0.1, unit), (2.0, unit))
        alpha_x = alpha_y = alpha
    elif preset is TablePreset.POWER_BY_CERTAINTY:
        n = _POWER_TABLE_N
        components_x = ((0.0, unit), (1.0, unit))
        components_y = ((values['delta'], unit), (0.0, unit))
        alpha_x = alpha_y = values['alpha']
    else:
        pair = (values['alpha'], values['alpha_prime'])
        if pair not in _WEIGHT_PAIRS:
            raise ConfigurationError(f'table {preset} has no (alpha, alpha_prime) = {pair}; available: '
                                     f'{", ".join(str(p) for p in _WEIGHT_PAIRS)}.')
        n = int(values['n'])
        components_x = ((0.0, unit), (1.0, unit))
        components_y = ((0.5, unit), (0.0, unit))
        alpha_x, alpha_y = pair

    return ExperimentConfig(design_x=BlockDesign(n, alpha_x, alpha_x),
                            design_y=BlockDesign(n, alpha_y, alpha_y),
                            components_x=components_x,
                            components_y=components_y,
                            tested_component=1,
                            level=DEFAULT_SIMULATION_LEVEL,
                            repetitions=repetitions,
                            seed=seed,
                            tests=_TABLE_TESTS[preset],
                            table=str(preset),
                            cell=format_cell(values))
