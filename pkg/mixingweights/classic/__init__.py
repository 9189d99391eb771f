from .classic import (LabeledSample, SubgroupStats, values_stats, subgroup_stats, welch_outcome, oracle_test,
                      expert_labels, expert_subsample, expert_test, EXPERT_THRESHOLD)
