from .parameters import TestProcedure, Population, Calibration, TablePreset, ExitStatus
from .gaussian import Level, std_normal_cdf, std_normal_quantile, critical_value, two_sided_p_value
from .mixing import (WeightsMatrix, InversionMatrix, MixtureSample, ComponentMeanEstimates, TestOutcome,
                     invert_weights, estimate_means, estimate_variance_term, mixing_test, lindeberg_diagnostic,
                     min_eigenvalue_diagnostic)
from .classic import LabeledSample, oracle_test, expert_test
from .simulation import (ComponentParams, BlockDesign, ExperimentConfig, ExperimentReport, ExperimentRunner,
                         sample_mixture, run_experiment, table_config)
from .dataprovider import (MicrodataRecord, MicrodataSchema, GroupWeightTable, load_microdata, weights_from_groups,
                           synthesize_microdata, read_experiment_config, write_experiment_config)

__all__ = ['TestProcedure', 'Population', 'Calibration', 'TablePreset', 'ExitStatus',
           'Level', 'std_normal_cdf', 'std_normal_quantile', 'critical_value', 'two_sided_p_value',
           'WeightsMatrix', 'InversionMatrix', 'MixtureSample', 'ComponentMeanEstimates', 'TestOutcome',
           'invert_weights', 'estimate_means', 'estimate_variance_term', 'mixing_test', 'lindeberg_diagnostic',
           'min_eigenvalue_diagnostic', 'LabeledSample', 'oracle_test', 'expert_test',
           'ComponentParams', 'BlockDesign', 'ExperimentConfig', 'ExperimentReport', 'ExperimentRunner',
           'sample_mixture', 'run_experiment', 'table_config',
           'MicrodataRecord', 'MicrodataSchema', 'GroupWeightTable', 'load_microdata', 'weights_from_groups',
           'synthesize_microdata', 'read_experiment_config', 'write_experiment_config']
