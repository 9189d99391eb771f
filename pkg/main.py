from mixingweights import *
from mixingweights.dataprovider import calibration_table, labeled_from_records
from mixingweights.utils import NotAvailableError
from pprint import pprint


if __name__ == '__main__':
    help(ExperimentRunner)

    # one cell of the power table at desk scale
    config = table_config(TablePreset.POWER_BY_CERTAINTY, 'alpha=0.75,delta=0.3', repetitions=2000, seed=42)
    pprint(config)

    report = ExperimentRunner(chunk_size=250, maximum_concurrent_number=4).async_run(config)
    for row in report.to_rows():
        pprint(row)

    design = config.design_x.weights()
    inv = invert_weights(design)
    print(f'Lindeberg ratio, component 1: {lindeberg_diagnostic(inv, 1):.6f}')
    print(f'Smallest eigenvalue of the normalized Gram matrix: {min_eigenvalue_diagnostic(design):.6f}')

    # synthetic survey under the gender calibration, second component
    records = synthesize_microdata(Calibration.GENDER, per_group=500, seed=7)
    x, y = weights_from_groups(records, calibration_table(Calibration.GENDER))
    labeled_x, labeled_y = labeled_from_records(records)

    pprint(mixing_test(x, y, 2, 0.1))
    pprint(oracle_test(labeled_x, labeled_y, 2, 0.1))
    try:
        pprint(expert_test(x, y, 2, 0.1))
    except NotAvailableError as error:
        print(f'Expert test: {error}')
