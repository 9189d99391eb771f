"""Command-line tool: two-sample mean tests on weighted microdata, Monte Carlo experiments and
design diagnostics.

    python -m mixingweights test --data survey.csv --calibration age --component 1
    python -m mixingweights simulate --table 3 --cell n=2000 --reps 10000 --seed 42
    python -m mixingweights diagnose --n 1000 --alpha 0.75 --beta 0.75
    python -m mixingweights fixture --calibration gender --output survey.csv --weights-output weights.csv

Every subcommand writes CSV to stdout (or --output) and its log to stderr. The exit status is
0 whenever the command ran, whatever the test decisions.
"""
import argparse
import logging
import sys
from typing import Optional, Sequence

import pandas as pd

from mixingweights.classic.classic import expert_test, oracle_test
from mixingweights.dataprovider.provider import (MicrodataSchema, calibration_table, count_records,
                                                 labeled_from_records, load_microdata, load_weight_table,
                                                 read_experiment_config, synthesize_microdata, weight_rows,
                                                 weights_from_groups, write_microdata, write_report_csv,
                                                 write_weight_table)
from mixingweights.gaussian.gaussian import as_level
from mixingweights.mixing.mixing import (COMPONENTS, WeightsMatrix, invert_weights, lindeberg_diagnostic,
                                         min_eigenvalue_diagnostic, mixing_test)
from mixingweights.parameters.parameters import Calibration, ExitStatus, Population, TestProcedure
from mixingweights.simulation.harness import DEFAULT_REPETITIONS, block_weights, run_experiment, table_config
from mixingweights.utils.exceptions import (ConfigurationError, MixingWeightsError, NotAvailableError,
                                            exit_status_handler)

logger = logging.getLogger(__name__)

DEFAULT_TEST_LEVEL: float = 0.1
NOT_AVAILABLE: str = 'non-available'
TEST_HEADER: tuple[str, ...] = ('test', 'decision', 'statistic', 'p_value')
DIAGNOSE_HEADER: tuple[str, ...] = ('population', 'n', 'lindeberg_1', 'lindeberg_2', 'min_eigenvalue')


def _procedures(raw: str) -> list[TestProcedure]:
    requested = {TestProcedure.parse(t) for t in raw.split(',') if t.strip()}
    if not requested:
        raise ConfigurationError('at least one test is required.')
    return [p for p in TestProcedure if p in requested]


def _schema(args: argparse.Namespace) -> MicrodataSchema:
    return MicrodataSchema(first=args.first_population, second=args.second_population)


def _weight_table(args: argparse.Namespace, schema: MicrodataSchema):
    if args.weights:
        return load_weight_table(args.weights, schema)
    if args.calibration:
        return calibration_table(args.calibration)
    raise ConfigurationError('a group weight table is required: give --weights or --calibration.')


def _open_output(path: Optional[str]):
    return open(path, 'w', newline='', encoding='utf-8') if path else sys.stdout


def _emit(frame: pd.DataFrame, path: Optional[str]) -> None:
    stream = _open_output(path)
    try:
        frame.to_csv(stream, index=False)
    finally:
        if stream is not sys.stdout:
            stream.close()


def command_test(args: argparse.Namespace) -> None:
    """Runs the requested tests on ingested microdata, one CSV row per test."""
    schema = _schema(args)
    records = load_microdata(args.data, schema)
    x, y = weights_from_groups(records, _weight_table(args, schema))
    labeled = labeled_from_records(records)
    level = as_level(args.level)
    l = args.component
    rows = []
    for procedure in _procedures(args.tests):
        if procedure is TestProcedure.ORACLE and labeled is None:
            logger.warning('oracle test non-available: the microdata carry no complete label column')
            rows.append((str(procedure), NOT_AVAILABLE, None, None))
            continue
        try:
            if procedure is TestProcedure.ORACLE:
                outcome = oracle_test(labeled[0], labeled[1], l, level)
            elif procedure is TestProcedure.EXPERT:
                outcome = expert_test(x, y, l, level)
            else:
                outcome = mixing_test(x, y, l, level)
        except NotAvailableError as error:
            logger.warning('%s', error)
            rows.append((str(procedure), NOT_AVAILABLE, None, None))
            continue
        logger.info('%s test, component %d: statistic %.6g, p-value %.6g, %s', procedure, l,
                    outcome.statistic, outcome.p_value, outcome.decision)
        rows.append((str(procedure), outcome.decision, repr(outcome.statistic), repr(outcome.p_value)))
    _emit(pd.DataFrame(rows, columns=list(TEST_HEADER)), args.output)


def command_simulate(args: argparse.Namespace) -> None:
    """Runs experiments from a configuration file or from published table cells."""
    if args.config:
        if args.table is not None or args.cell:
            raise ConfigurationError('--config cannot be combined with --table/--cell.')
        configs = [read_experiment_config(args.config).with_run(repetitions=args.reps, seed=args.seed)]
    elif args.table is not None:
        if not args.cell:
            raise ConfigurationError('--table needs at least one --cell.')
        configs = [table_config(args.table, cell, repetitions=args.reps or DEFAULT_REPETITIONS,
                                seed=args.seed or 0) for cell in args.cell]
    else:
        raise ConfigurationError('give either --config or --table with --cell.')
    reports = [run_experiment(config, concurrent=args.concurrent) for config in configs]
    stream = _open_output(args.output)
    try:
        write_report_csv(reports, stream)
    finally:
        if stream is not sys.stdout:
            stream.close()


def _diagnose_row(population: str, weights: WeightsMatrix) -> tuple:
    inv = invert_weights(weights)
    return (population, weights.n, *(lindeberg_diagnostic(inv, l) for l in COMPONENTS),
            min_eigenvalue_diagnostic(weights))


def command_diagnose(args: argparse.Namespace) -> None:
    """Lindeberg ratios and smallest eigenvalue of a block design or of ingested data."""
    if args.data:
        schema = _schema(args)
        records = load_microdata(args.data, schema)
        table = _weight_table(args, schema)
        rows = [_diagnose_row(str(population), WeightsMatrix(weight_rows(records, table, population)))
                for population in Population]
    elif args.n is not None and args.alpha is not None:
        beta = args.alpha if args.beta is None else args.beta
        rows = [_diagnose_row('block', WeightsMatrix(block_weights(args.n, args.alpha, beta)))]
    else:
        raise ConfigurationError('give either --data with a weight table or --n with --alpha.')
    _emit(pd.DataFrame(rows, columns=list(DIAGNOSE_HEADER)), args.output)


def command_fixture(args: argparse.Namespace) -> None:
    """Writes synthetic microdata (with labels) following a calibration, and its weight table."""
    schema = _schema(args)
    records = synthesize_microdata(args.calibration, per_group=args.per_group, seed=args.seed)
    write_microdata(records, args.output, schema)
    if args.weights_output:
        write_weight_table(calibration_table(args.calibration), args.weights_output, schema)
    logger.info('wrote %d records to %s, %s', len(records), args.output,
                ', '.join(f'{p}/{g}: {c}' for (p, g), c in count_records(records).items()))


def _add_data_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--weights', help='group weight table CSV (population,group,w1,w2)')
    parser.add_argument('--calibration', choices=[str(c) for c in Calibration],
                        help='shipped group weight table, used when --weights is absent')
    parser.add_argument('--first-population', default=str(Population.FIRST),
                        help='value of the population column naming the first population')
    parser.add_argument('--second-population', default=str(Population.SECOND),
                        help='value of the population column naming the second population')
    parser.add_argument('--output', help='output CSV file (default: stdout)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='mixingweights',
                                     description='Two-sample mean tests for mixtures with known varying weights.')
    parser.add_argument('-v', '--verbose', action='store_true', help='debug logging on stderr')
    subparsers = parser.add_subparsers(dest='command', required=True)

    test = subparsers.add_parser('test', help='test m_l = m\'_l on microdata')
    test.add_argument('--data', required=True, help='microdata CSV (value,group,population[,label])')
    test.add_argument('--component', type=int, choices=COMPONENTS, default=1)
    test.add_argument('--level', type=float, default=DEFAULT_TEST_LEVEL)
    test.add_argument('--tests', default=','.join(str(p) for p in TestProcedure),
                      help='comma separated subset of oracle,expert,mixing')
    _add_data_arguments(test)
    test.set_defaults(func=command_test)

    simulate = subparsers.add_parser('simulate', help='Monte Carlo rejection rates')
    simulate.add_argument('--config', help='experiment configuration (key=value, or YAML for .yaml/.yml)')
    simulate.add_argument('--table', type=int, help='published table, 1 to 5')
    simulate.add_argument('--cell', action='append', help='cell selector, e.g. n=2000 (repeatable)')
    simulate.add_argument('--reps', type=int, help=f'repetitions (default {DEFAULT_REPETITIONS})')
    simulate.add_argument('--seed', type=int, help='master seed (default 0)')
    simulate.add_argument('--concurrent', action='store_true', help='run chunks of repetitions in worker threads')
    simulate.add_argument('--output', help='output CSV file (default: stdout)')
    simulate.set_defaults(func=command_simulate)

    diagnose = subparsers.add_parser('diagnose', help='design diagnostics')
    diagnose.add_argument('--n', type=int, help='block design size')
    diagnose.add_argument('--alpha', type=float, help='weight of component 1 on the first block')
    diagnose.add_argument('--beta', type=float, help='weight of component 2 on the second block (default alpha)')
    diagnose.add_argument('--data', help='microdata CSV, diagnosed per population')
    _add_data_arguments(diagnose)
    diagnose.set_defaults(func=command_diagnose)

    fixture = subparsers.add_parser('fixture', help='synthetic microdata following a calibration')
    fixture.add_argument('--calibration', required=True, choices=[str(c) for c in Calibration])
    fixture.add_argument('--per-group', type=int, default=500)
    fixture.add_argument('--seed', type=int, default=0)
    fixture.add_argument('--output', required=True, help='microdata CSV to write')
    fixture.add_argument('--weights-output', help='weight table CSV to write')
    fixture.add_argument('--first-population', default=str(Population.FIRST))
    fixture.add_argument('--second-population', default=str(Population.SECOND))
    fixture.set_defaults(func=command_fixture)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """This returns the exit status of one command-line invocation.

    Usage errors detected by argparse exit through SystemExit with status 2.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(asctime)s %(name)s %(levelname)s: %(message)s', stream=sys.stderr)
    try:
        args.func(args)
    except (MixingWeightsError, OSError) as error:
        status = exit_status_handler(error)
        logger.error('%s', error)
        print(f'mixingweights {args.command}: {error}', file=sys.stderr)
        return status.value
    return ExitStatus.SUCCESS.value
