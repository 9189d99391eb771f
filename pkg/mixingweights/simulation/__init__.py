from .harness import (ComponentParams, BlockDesign, ExperimentConfig, TestTally, ExperimentReport, ExperimentRunner,
                      block_weights, substream, draw_mixture, sample_mixture, mixture_variance, printed_lambda_min,
                      run_experiment, collect_mixing_statistics, table_config, PAPER_REPETITIONS, DEFAULT_REPETITIONS,
                      DEFAULT_SIMULATION_LEVEL)
