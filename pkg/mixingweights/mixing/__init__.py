from .mixing import (WeightsMatrix, InversionMatrix, MixtureSample, ComponentMeanEstimates, TestOutcome,
                     outcome_from_statistic, invert_weights, estimate_means, estimate_variance_term,
                     signed_mixing_statistic, mixing_test, lindeberg_diagnostic, min_eigenvalue_diagnostic,
                     check_component, RANK_TOLERANCE, WEIGHT_SUM_TOLERANCE)
