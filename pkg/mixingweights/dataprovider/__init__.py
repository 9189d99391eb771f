from .provider import (MicrodataRecord, MicrodataSchema, GroupWeightTable, DEFAULT_SCHEMA, REPORT_HEADER,
                       load_microdata, write_microdata, load_weight_table, write_weight_table, weight_rows,
                       weights_from_groups, labeled_from_records, calibration_table, calibration_components,
                       fixture_manifest, count_records, synthesize_microdata, config_from_mapping, config_to_mapping,
                       read_experiment_config, write_experiment_config, write_report_csv)
