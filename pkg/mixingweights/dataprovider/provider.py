"""Ingestion of survey-style microdata and of group weight tables.

Labels (e.g. the means of transportation) are not collected at the microdata level; an
auxiliary categorical variable (e.g. an age bracket) is, and aggregate tables give, for each
population and each group of the auxiliary variable, the proportion of each label. Those
proportions are the known mixing-weights of every record of the group.
"""
import csv
import io
import logging
import math
import re
from pathlib import Path
from typing import IO, Iterator, Optional, Union

import numpy as np
import pandas as pd
import yaml
from attrs import asdict, field, frozen

from mixingweights.classic.classic import LabeledSample
from mixingweights.mixing.mixing import WEIGHT_SUM_TOLERANCE, MixtureSample, WeightsMatrix
from mixingweights.parameters.parameters import Calibration, Population
from mixingweights.simulation.harness import (BlockDesign, ComponentParams, ExperimentConfig, ExperimentReport,
                                              draw_mixture, substream)
from mixingweights.utils.exceptions import (ConfigurationError, DataError, EmptyInputError, RowError, SchemaError,
                                            UnknownGroupError)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
REPORT_HEADER: tuple[str, ...] = ('table', 'cell', 'test', 'rate', 'se', 'reps', 'seed')
WEIGHT_TABLE_HEADER: tuple[str, ...] = ('population', 'group', 'w1', 'w2')
_LABELS: dict[str, int] = {'1': 1, '2': 2}


def _nonempty(instance, attribute, value):
    if not value:
        raise DataError(f'{attribute.name} must not be empty.')


@frozen
class MicrodataRecord:
    """One surveyed unit.

    Attributes
    ----------
    value: float
        Measured variable (e.g. travel time in minutes).
    group: str
        Auxiliary categorical key (e.g. age bracket) that drives the mixing-weights.
    population: Population
        Population the unit belongs to.
    true_label: int, optional
        Component label when known (oracle validation only).
    """
    value: float = field(converter=float)
    group: str = field(converter=str, validator=_nonempty)
    population: Population = field(converter=Population)
    true_label: Optional[int] = None

    @value.validator
    def _check_value(self, attribute, value):
        if not math.isfinite(value):
            raise DataError(f'record value must be finite, got {value!r}.')


@frozen
class MicrodataSchema:
    """Column names of a microdata file and the raw strings naming the two populations.

    Attributes
    ----------
    value, group, population: str
        Required columns.
    label: str
        Optional label column, ignored when absent from the file.
    first, second: str
        Raw values of the population column for the first and the second population.
    """
    value: str = 'value'
    group: str = 'group'
    population: str = 'population'
    label: str = 'label'
    first: str = str(Population.FIRST)
    second: str = str(Population.SECOND)

    def population_of(self, raw: str) -> Optional[Population]:
        return {self.first: Population.FIRST, self.second: Population.SECOND}.get(raw)

    def raw_population(self, population: Population) -> str:
        return self.first if population is Population.FIRST else self.second


DEFAULT_SCHEMA = MicrodataSchema()


def _check_weight_pair(key, pair) -> tuple[float, float]:
    w1, w2 = float(pair[0]), float(pair[1])
    if not (w1 >= 0.0 and w2 >= 0.0 and abs(w1 + w2 - 1.0) <= WEIGHT_SUM_TOLERANCE):
        raise DataError(f'weights {(w1, w2)} of {key} must be nonnegative and sum to 1.')
    return w1, w2


def _as_entries(entries) -> dict:
    checked = {}
    for (population, group), pair in dict(entries).items():
        key = (Population(str(population)), str(group))
        checked[key] = _check_weight_pair(key, pair)
    return checked


@frozen
class GroupWeightTable:
    """Mixing-weights (ω_1, ω_2) of every (population, group)."""
    entries: dict = field(converter=_as_entries)

    def lookup(self, population: Population, group: str) -> tuple[float, float]:
        """This returns the weight pair of a (population, group).

        Raises
        ------
        UnknownGroupError
            If the key has no entry.

        """
        try:
            return self.entries[(population, group)]
        except KeyError:
            raise UnknownGroupError(population=str(population), group=group) from None

    def groups(self, population: Population) -> list[str]:
        return [group for (p, group) in self.entries if p is population]


_PARSER_LINE = re.compile(r'line (\d+)')


def _check_field_counts(path: PathLike, text: str) -> None:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        return
    for fields in reader:
        # blank lines are reported by the row parser
        if fields and len(fields) != len(header):
            raise RowError(str(path), reader.line_num, 'row', ','.join(fields),
                           f'{len(fields)} fields, header has {len(header)}')


def _read_frame(path: PathLike, required: list[str]) -> pd.DataFrame:
    try:
        text = Path(path).read_text(encoding='utf-8-sig')
    except UnicodeDecodeError as error:
        raise DataError(f'{path}: not UTF-8 text ({error.reason} at byte {error.start}).') from None
    _check_field_counts(path, text)
    try:
        frame = pd.read_csv(io.StringIO(text), dtype=str, index_col=False, keep_default_na=False,
                            skip_blank_lines=False).fillna('')
    except pd.errors.EmptyDataError:
        raise EmptyInputError(f'{path}: empty file.') from None
    except pd.errors.ParserError as error:
        found = _PARSER_LINE.search(str(error))
        raise RowError(str(path), int(found.group(1)) if found else 0, 'row', '', str(error)) from None
    frame.columns = [str(c).strip() for c in frame.columns]
    missing = [column for column in required if column not in frame.columns]
    if missing:
        raise SchemaError(missing=missing, path=str(path))
    if frame.empty:
        raise EmptyInputError(f'{path}: no data row.')
    return frame


def _parse_float(path: PathLike, line: int, column: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise RowError(str(path), line, column, raw, 'not a number') from None
    if not math.isfinite(value):
        raise RowError(str(path), line, column, raw, 'not finite')
    return value


def _parse_records(path: PathLike, frame: pd.DataFrame, schema: MicrodataSchema) -> Iterator[MicrodataRecord]:
    has_label = schema.label in frame.columns
    for offset, row in enumerate(frame.to_dict(orient='records')):
        line = offset + 2
        value = _parse_float(path, line, schema.value, row[schema.value])
        group = row[schema.group].strip()
        if not group:
            raise RowError(str(path), line, schema.group, row[schema.group], 'empty group')
        population = schema.population_of(row[schema.population].strip())
        if population is None:
            raise RowError(str(path), line, schema.population, row[schema.population],
                           f'expected {schema.first!r} or {schema.second!r}')
        label = None
        if has_label and row[schema.label].strip():
            label = _LABELS.get(row[schema.label].strip())
            if label is None:
                raise RowError(str(path), line, schema.label, row[schema.label], 'expected 1 or 2')
        yield MicrodataRecord(value=value, group=group, population=population, true_label=label)


def load_microdata(path: PathLike, schema: MicrodataSchema = DEFAULT_SCHEMA) -> list[MicrodataRecord]:
    """This returns the list of records of a microdata CSV file.

    Parameters
    ----------
    path: str or Path
        UTF-8, comma separated file with a header row; '.' is the decimal point.
    schema: MicrodataSchema, optional
        Column mapping. The label column is optional; an empty label cell means unknown.

    Returns
    -------
    list of MicrodataRecord
        Records in file order.

    Raises
    ------
    SchemaError
        If a required column is missing.
    RowError
        If a cell cannot be parsed or a row has more or fewer fields than the header; the
        error names the 1-based line (header is line 1).
    EmptyInputError
        If the file holds no data row.
    DataError
        If the file is not UTF-8 text.

    """
    frame = _read_frame(path, [schema.value, schema.group, schema.population])
    records = list(_parse_records(path, frame, schema))
    logger.info('loaded %d records from %s', len(records), path)
    return records


def write_microdata(records: list[MicrodataRecord], path: PathLike, schema: MicrodataSchema = DEFAULT_SCHEMA) -> None:
    """Writes records as a microdata CSV file readable by load_microdata (values at full precision)."""
    frame = pd.DataFrame({
        schema.value: [r.value for r in records],
        schema.group: [r.group for r in records],
        schema.population: [schema.raw_population(r.population) for r in records],
        schema.label: ['' if r.true_label is None else str(r.true_label) for r in records],
    })
    frame.to_csv(path, index=False)


def load_weight_table(path: PathLike, schema: MicrodataSchema = DEFAULT_SCHEMA) -> GroupWeightTable:
    """This returns the group weight table of a CSV file with columns population, group, w1, w2.

    Raises
    ------
    SchemaError, RowError, EmptyInputError, DataError
        As load_microdata. A (population, group) key given twice is a RowError.

    """
    frame = _read_frame(path, list(WEIGHT_TABLE_HEADER))
    entries = {}
    for offset, row in enumerate(frame.to_dict(orient='records')):
        line = offset + 2
        population = schema.population_of(row['population'].strip())
        if population is None:
            raise RowError(str(path), line, 'population', row['population'],
                           f'expected {schema.first!r} or {schema.second!r}')
        key = (population, row['group'].strip())
        if key in entries:
            raise RowError(str(path), line, 'group', row['group'], f'duplicate entry for population {population}')
        pair = (_parse_float(path, line, 'w1', row['w1']), _parse_float(path, line, 'w2', row['w2']))
        try:
            entries[key] = _check_weight_pair(row['group'], pair)
        except DataError as error:
            raise RowError(str(path), line, 'w1,w2', f'{row["w1"]},{row["w2"]}', str(error)) from None
    return GroupWeightTable(entries)


def write_weight_table(table: GroupWeightTable, path: PathLike, schema: MicrodataSchema = DEFAULT_SCHEMA) -> None:
    rows = [(schema.raw_population(p), group, w1, w2) for (p, group), (w1, w2) in table.entries.items()]
    pd.DataFrame(rows, columns=list(WEIGHT_TABLE_HEADER)).to_csv(path, index=False)


def weight_rows(records: list[MicrodataRecord], table: GroupWeightTable, population: Population) -> np.ndarray:
    """Weight rows of the records of one population, in record order."""
    return np.array([table.lookup(r.population, r.group) for r in records if r.population is population],
                    dtype=np.float64).reshape(-1, 2)


def weights_from_groups(records: list[MicrodataRecord],
                        table: GroupWeightTable) -> tuple[MixtureSample, MixtureSample]:
    """This returns one MixtureSample per population, each record weighted by the table entry
    of its group.

    Parameters
    ----------
    records: list of MicrodataRecord
    table: GroupWeightTable
        Weights computed beforehand (e.g. from the full survey counts), not from the records.

    Returns
    -------
    tuple of MixtureSample
        (first population, second population); the order of the records is preserved.

    Raises
    ------
    UnknownGroupError
        If a (population, group) has no table entry.

    """
    samples = []
    for population in Population:
        values = [r.value for r in records if r.population is population]
        samples.append(MixtureSample(values, WeightsMatrix(weight_rows(records, table, population))))
    return samples[0], samples[1]


def labeled_from_records(records: list[MicrodataRecord]) -> Optional[tuple[LabeledSample, LabeledSample]]:
    """This returns the labeled view of both populations, or None when a label is missing."""
    if any(r.true_label is None for r in records):
        return None
    samples = []
    for population in Population:
        members = [r for r in records if r.population is population]
        samples.append(LabeledSample([r.value for r in members], [r.true_label for r in members]))
    return samples[0], samples[1]


# --------------------------------------------------------------
# Calibrations
# --------------------------------------------------------------

_CALIBRATION_WEIGHTS: dict[Calibration, dict] = {
    Calibration.AGE: {
        (Population.FIRST, 'over21'): (0.5193, 0.4807),
        (Population.FIRST, 'under20'): (0.3465, 0.6535),
        (Population.SECOND, 'over21'): (0.574, 0.426),
        (Population.SECOND, 'under20'): (0.4277, 0.5723),
    },
    Calibration.GENDER: {
        (Population.FIRST, 'men'): (0.558, 0.442),
        (Population.FIRST, 'women'): (0.753, 0.247),
        (Population.SECOND, 'men'): (0.508, 0.492),
        (Population.SECOND, 'women'): (0.654, 0.346),
    },
}

# travel times in minutes: (label 1, label 2) mean and standard deviation per population
_CALIBRATION_COMPONENTS: dict[Calibration, dict] = {
    Calibration.AGE: {
        Population.FIRST: ((47.26, 28.79), (12.25, 12.18)),
        Population.SECOND: ((45.12, 28.84), (11.23, 12.23)),
    },
    Calibration.GENDER: {
        Population.FIRST: ((47.3, 28.8), (71.0, 30.0)),
        Population.SECOND: ((41.8, 26.4), (63.1, 25.7)),
    },
}


def calibration_table(calibration: Union[Calibration, str]) -> GroupWeightTable:
    """Group weight table of a shipped calibration."""
    return GroupWeightTable(_CALIBRATION_WEIGHTS[Calibration.parse(calibration)])


def calibration_components(calibration: Union[Calibration, str],
                           population: Population) -> tuple[ComponentParams, ComponentParams]:
    first, second = _CALIBRATION_COMPONENTS[Calibration.parse(calibration)][population]
    return ComponentParams(*first), ComponentParams(*second)


def fixture_manifest(calibration: Union[Calibration, str], per_group: int) -> dict[tuple[Population, str], int]:
    """Record counts per (population, group) of a synthetic fixture."""
    return {key: per_group for key in calibration_table(calibration).entries}


def count_records(records: list[MicrodataRecord]) -> dict[tuple[Population, str], int]:
    counts: dict[tuple[Population, str], int] = {}
    for record in records:
        key = (record.population, record.group)
        counts[key] = counts.get(key, 0) + 1
    return counts


def synthesize_microdata(calibration: Union[Calibration, str], per_group: int = 500,
                         seed: int = 0) -> list[MicrodataRecord]:
    """This returns synthetic microdata following a calibration.

    Every (population, group) receives exactly per_group records, in table order. Labels are
    drawn from the group weights and values from the Gaussian component of the label; the
    first population uses substream(seed, 0, 0), the second substream(seed, 0, 1).

    Parameters
    ----------
    calibration: Calibration
    per_group: int, optional
        Records per (population, group), default 500.
    seed: int, optional

    Returns
    -------
    list of MicrodataRecord
        Records carry their drawn label.

    """
    if per_group < 1:
        raise ConfigurationError(f'per_group must be positive, got {per_group}.')
    table = calibration_table(calibration)
    records: list[MicrodataRecord] = []
    for index, population in enumerate(Population):
        groups = [g for g in table.groups(population) for _ in range(per_group)]
        weights = WeightsMatrix([table.lookup(population, g) for g in groups])
        _, labeled = draw_mixture(weights, calibration_components(calibration, population),
                                  substream(seed, 0, index))
        records.extend(MicrodataRecord(value=v, group=g, population=population, true_label=int(u))
                       for v, g, u in zip(labeled.values, groups, labeled.labels))
    return records


# --------------------------------------------------------------
# Experiment configuration files and reports
# --------------------------------------------------------------

_CONFIG_KEYS: tuple[str, ...] = ('table', 'cell', 'n_x', 'alpha_x', 'beta_x', 'n_y', 'alpha_y', 'beta_y',
                                 'm1_x', 'sigma1_x', 'm2_x', 'sigma2_x', 'm1_y', 'sigma1_y', 'm2_y', 'sigma2_y',
                                 'component', 'level', 'repetitions', 'seed', 'tests')
_OPTIONAL_KEYS: dict[str, str] = {'table': 'custom', 'cell': '-', 'component': '1', 'level': '0.05',
                                  'repetitions': '10000', 'seed': '0', 'tests': 'oracle,expert,mixing'}


def _parse_flat(text: str, path: PathLike) -> dict[str, str]:
    entries = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        key, sep, value = line.partition('=')
        if not sep:
            raise ConfigurationError(f'{path}, line {number}: expected key=value, got {raw!r}.')
        entries[key.strip()] = value.strip()
    return entries


def config_from_mapping(entries: dict) -> ExperimentConfig:
    """Builds an ExperimentConfig from the flat keys of a configuration file."""
    unknown = sorted(set(entries) - set(_CONFIG_KEYS))
    if unknown:
        raise ConfigurationError(f'unknown configuration key(s): {", ".join(unknown)}.')
    values = {**_OPTIONAL_KEYS, **{k: v for k, v in entries.items() if v is not None}}
    missing = [k for k in _CONFIG_KEYS if k not in values]
    if missing:
        raise ConfigurationError(f'missing configuration key(s): {", ".join(missing)}.')
    tests = values['tests']
    if isinstance(tests, str):
        tests = [t for t in tests.split(',') if t.strip()]
    try:
        return ExperimentConfig(
            design_x=BlockDesign(int(values['n_x']), float(values['alpha_x']), float(values['beta_x'])),
            design_y=BlockDesign(int(values['n_y']), float(values['alpha_y']), float(values['beta_y'])),
            components_x=((float(values['m1_x']), float(values['sigma1_x'])),
                          (float(values['m2_x']), float(values['sigma2_x']))),
            components_y=((float(values['m1_y']), float(values['sigma1_y'])),
                          (float(values['m2_y']), float(values['sigma2_y']))),
            tested_component=int(values['component']),
            level=float(values['level']),
            repetitions=int(values['repetitions']),
            seed=int(values['seed']),
            tests=tests,
            table=values['table'],
            cell=values['cell'])
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as error:
        raise ConfigurationError(f'invalid configuration value: {error}.') from None


def config_to_mapping(config: ExperimentConfig) -> dict:
    components = {}
    for suffix, pair in (('x', config.components_x), ('y', config.components_y)):
        for index, params in enumerate(pair, start=1):
            components.update({f'm{index}_{suffix}': params.m, f'sigma{index}_{suffix}': params.sigma})
    mapping = {
        'table': config.table, 'cell': config.cell,
        **{f'{key}_x': value for key, value in asdict(config.design_x).items()},
        **{f'{key}_y': value for key, value in asdict(config.design_y).items()},
        **components,
        'component': config.tested_component, 'level': config.level.r, 'repetitions': config.repetitions,
        'seed': config.seed, 'tests': ','.join(str(t) for t in config.tests),
    }
    return {key: mapping[key] for key in _CONFIG_KEYS}


def read_experiment_config(path: PathLike) -> ExperimentConfig:
    """This returns the ExperimentConfig stored in a flat key=value file, or in a YAML mapping
    with the same keys when the file name ends in .yaml or .yml.

    Raises
    ------
    ConfigurationError
        If a key is unknown or missing, or a value is invalid.

    """
    path = Path(path)
    text = path.read_text(encoding='utf-8')
    if path.suffix.lower() in ('.yaml', '.yml'):
        entries = yaml.safe_load(text) or {}
        if not isinstance(entries, dict):
            raise ConfigurationError(f'{path}: expected a mapping of configuration keys.')
    else:
        entries = _parse_flat(text, path)
    logger.debug('read configuration %s: %s', path, entries)
    return config_from_mapping(entries)


def write_experiment_config(config: ExperimentConfig, path: PathLike) -> None:
    """Writes config in the format chosen by the file suffix (YAML or flat key=value)."""
    path = Path(path)
    mapping = config_to_mapping(config)
    if path.suffix.lower() in ('.yaml', '.yml'):
        path.write_text(yaml.safe_dump(mapping, sort_keys=False), encoding='utf-8')
    else:
        path.write_text(''.join(f'{key}={value}\n' for key, value in mapping.items()), encoding='utf-8')


def write_report_csv(reports: list[ExperimentReport], stream: IO[str]) -> None:
    """Writes the rows of every report as CSV with the header table,cell,test,rate,se,reps,seed."""
    rows = [row for report in reports for row in report.to_rows()]
    pd.DataFrame(rows, columns=list(REPORT_HEADER)).to_csv(stream, index=False)
