from typing import Optional


class MixingWeightsError(Exception):
    """Base class of every error raised by the package."""


class ConfigurationError(MixingWeightsError, ValueError):
    """Invalid experiment, table, cell or command-line configuration."""


class DomainError(MixingWeightsError, ValueError):
    """Argument outside the mathematical domain of an operation (non-finite, negative, ...)."""


class ContractError(MixingWeightsError, ValueError):
    """Inputs that violate a type invariant or disagree in dimension."""


class NumericalError(MixingWeightsError, ArithmeticError):
    """The computation is not defined for the given data."""


class SingularDesignError(NumericalError):
    """The mixing-weights operator is not full rank.

    Attributes
    ----------
    determinant: float
        Determinant of the Gram matrix ^tΩΩ that failed the rank tolerance.
    n: int
        Sample size, the rank tolerance applies to determinant / n**2.
    """

    def __init__(self, determinant: float, n: int):
        self.determinant = determinant
        self.n = n
        super().__init__(f'singular mixing-weights operator: det(^tΩΩ) = {determinant:.6g} '
                         f'for n = {n} (normalized {determinant / n ** 2:.3g} below rank tolerance)')


class DegenerateVarianceError(NumericalError):
    """The estimated variance of the statistic is zero while the estimates differ."""


class NotAvailableError(MixingWeightsError):
    """A Welch-type test cannot be computed because a subgroup is empty.

    Attributes
    ----------
    component: int
        Tested component l.
    population: str
        Population whose subgroup is empty.
    procedure: str
        Name of the test that could not be computed (oracle or expert).
    """

    def __init__(self, component: int, population: str, procedure: str):
        self.component = component
        self.population = population
        self.procedure = procedure
        super().__init__(f'{procedure} test non-available: no observation of the {population} population '
                         f'is allocated to component {component}')


class DataError(MixingWeightsError):
    """Base class for ingestion errors."""


class SchemaError(DataError):
    """A declared column is absent from the file header."""

    def __init__(self, missing: list[str], path: str):
        self.missing = missing
        super().__init__(f'{path}: missing column(s) {", ".join(missing)}')


class RowError(DataError):
    """A row of an input file cannot be parsed.

    Attributes
    ----------
    line: int
        1-based line number in the file (the header is line 1).
    """

    def __init__(self, path: str, line: int, column: str, raw: str, reason: Optional[str] = None):
        self.line = line
        self.column = column
        detail = f': {reason}' if reason else ''
        super().__init__(f'{path}, line {line}: cannot parse {column}={raw!r}{detail}')


class EmptyInputError(DataError):
    """The input file holds no data row."""


class UnknownGroupError(DataError, KeyError):
    """A (population, group) key has no entry in the group weight table."""

    def __init__(self, population: str, group: str):
        self.population = population
        self.group = group
        super().__init__(f'no mixing-weights for population {population!r}, group {group!r}')

    def __str__(self):
        return self.args[0]


def exit_status_handler(error: BaseException) -> 'ExitStatus':
    """Maps an exception onto the exit status reported by the command-line tool.

    Parameters
    ----------
    error: BaseException
        Exception caught at the top of a command.

    Returns
    -------
    ExitStatus
        USAGE for configuration errors, DATA for ingestion and file errors, NUMERICAL for
        singular designs and degenerate variances. Unknown exceptions map onto DATA.

    Notes
    -----
    .. [1] The most specific class wins: the switcher is walked along the exception MRO.

    """
    # parameters imports utils.decorators, so the enum is resolved at call time
    from mixingweights.parameters.parameters import ExitStatus

    switcher = {
        ConfigurationError: ExitStatus.USAGE,
        DomainError: ExitStatus.USAGE,
        ContractError: ExitStatus.DATA,
        DataError: ExitStatus.DATA,
        NotAvailableError: ExitStatus.DATA,
        OSError: ExitStatus.DATA,
        NumericalError: ExitStatus.NUMERICAL,
    }
    for cls in type(error).__mro__:
        if cls in switcher:
            return switcher[cls]
    return ExitStatus.DATA
