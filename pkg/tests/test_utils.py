import pytest

from mixingweights.parameters import ExitStatus, Population, TablePreset, TestProcedure
from mixingweights.utils import (ConfigurationError, DegenerateVarianceError, NotAvailableError, RowError,
                                 SingularDesignError, UnknownGroupError, exit_status_handler, format_cell, parse_cell,
                                 stringformat)


def test_parse_cell():
    assert parse_cell('delta=1, n=2000') == {'delta': 1.0, 'n': 2000.0}
    assert parse_cell('') == {}
    for bad in ('n', '=3', 'n=abc'):
        with pytest.raises(ConfigurationError):
            parse_cell(bad)


def test_format_cell():
    assert format_cell({'n': 2000.0, 'delta': 0.5}) == 'delta=0.5,n=2000'
    assert format_cell(parse_cell('alpha_prime=0.75,alpha=0.75,n=500')) == 'alpha=0.75,alpha_prime=0.75,n=500'


def test_enum_strings():
    assert str(TestProcedure.MIXING) == 'mixing'
    assert str(Population.SECOND) == 'second'
    assert str(TablePreset.POWER_BY_WEIGHT_PAIR) == '5'


def test_enum_parse_accepts_the_command_line_spelling():
    assert TestProcedure.parse(' Expert ') is TestProcedure.EXPERT
    assert TestProcedure.parse(TestProcedure.MIXING) is TestProcedure.MIXING
    assert TablePreset.parse(3) is TablePreset.POWER_ORACLE_MIXING
    assert TablePreset.parse('4') is TablePreset.POWER_BY_CERTAINTY


@pytest.mark.parametrize('enum, raw', [(TestProcedure, 'welch'), (TablePreset, 6), (Population, '')])
def test_enum_parse_rejects_unknown_spellings(enum, raw):
    with pytest.raises(ConfigurationError, match=str(list(enum)[0])):
        enum.parse(raw)


def test_stringformat_needs_an_enum():
    with pytest.raises(TypeError):
        stringformat(dict)


@pytest.mark.parametrize('error, status', [
    (ConfigurationError('bad'), ExitStatus.USAGE),
    (RowError('data.csv', 3, 'value', 'abc'), ExitStatus.DATA),
    (UnknownGroupError('first', 'over65'), ExitStatus.DATA),
    (NotAvailableError(2, 'first', 'expert'), ExitStatus.DATA),
    (FileNotFoundError('missing.csv'), ExitStatus.DATA),
    (SingularDesignError(0.0, 10), ExitStatus.NUMERICAL),
    (DegenerateVarianceError('zero'), ExitStatus.NUMERICAL),
    (RuntimeError('other'), ExitStatus.DATA),
])
def test_exit_statuses(error, status):
    assert exit_status_handler(error) is status


def test_error_messages():
    assert str(RowError('data.csv', 3, 'value', 'abc', 'not a number')) == \
        "data.csv, line 3: cannot parse value='abc': not a number"
    assert str(UnknownGroupError('first', 'over65')) == "no mixing-weights for population 'first', group 'over65'"
    assert 'component 2' in str(NotAvailableError(2, 'first', 'expert'))


def test_error_attributes():
    singular = SingularDesignError(2.5e-3, 50)
    assert (singular.determinant, singular.n) == (2.5e-3, 50)
    assert 'n = 50' in str(singular)
    unavailable = NotAvailableError(1, 'second', 'oracle')
    assert (unavailable.component, unavailable.population, unavailable.procedure) == (1, 'second', 'oracle')
    assert str(unavailable).startswith('oracle test non-available')
