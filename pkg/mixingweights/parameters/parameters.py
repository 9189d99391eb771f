from enum import Enum, unique
from mixingweights.utils.decorators import stringformat


@unique
@stringformat
class TestProcedure(Enum):
    """Two-sample mean tests available for mixture samples. List of all procedures:

        - ORACLE: Welch-type test on the true labels (benchmark, needs labels).
        - EXPERT: Welch-type test on the majority-weight pseudo-labels.
        - MIXING: moment test built on the inversion of the mixing-weights operator.

    """
    __test__ = False

    ORACLE = 'oracle'
    EXPERT = 'expert'
    MIXING = 'mixing'


@unique
@stringformat
class Population(Enum):
    """The two independent populations compared by a test.

        - FIRST: first sample (X).
        - SECOND: second sample (Y).

    """
    FIRST = 'first'
    SECOND = 'second'


@unique
@stringformat
class Calibration(Enum):
    """Group-weight calibrations shipped with the package.

        - AGE: New York vs California travel times, bus/trolley bus (label 1) vs walk (label 2),
          weights driven by age (over 21 / under 20).
        - GENDER: New York vs Illinois travel times, bus/trolley bus (label 1) vs railroad (label 2),
          weights driven by gender. The second label never holds a majority weight here.

    """
    AGE = 'age'
    GENDER = 'gender'


@unique
@stringformat
class TablePreset(Enum):
    """Simulation scenarios with published rejection rates.

        - WRONG_DECISIONS_EXPERT: equal first components, second components apart by delta.
        - CORRECT_DECISIONS_MIXING: first components 0 vs 0.1, second components 1 vs 2.
        - POWER_ORACLE_MIXING: same design, oracle against mixing.
        - POWER_BY_CERTAINTY: n = 1000, first components apart by delta bar, varying alpha.
        - POWER_BY_WEIGHT_PAIR: delta bar = 0.5 and several (alpha, alpha') pairs.

    """
    WRONG_DECISIONS_EXPERT = 1
    CORRECT_DECISIONS_MIXING = 2
    POWER_ORACLE_MIXING = 3
    POWER_BY_CERTAINTY = 4
    POWER_BY_WEIGHT_PAIR = 5


@unique
@stringformat
class ExitStatus(Enum):
    """Process exit statuses of the command-line tool.

        - SUCCESS: the command ran, whatever the test decisions.
        - USAGE: unknown flags or invalid command-line configuration.
        - DATA: unreadable file, schema or row error, unknown group key.
        - NUMERICAL: singular design or degenerate variance.

    """
    SUCCESS = 0
    USAGE = 2
    DATA = 3
    NUMERICAL = 4
