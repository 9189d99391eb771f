import pytest

from mixingweights.dataprovider import write_microdata, write_weight_table, calibration_table, synthesize_microdata
from mixingweights.parameters import Calibration


@pytest.fixture
def gender_fixture(tmp_path):
    """Synthetic microdata and weight table of the gender calibration, written to disk."""
    data, weights = tmp_path / 'survey.csv', tmp_path / 'weights.csv'
    write_microdata(synthesize_microdata(Calibration.GENDER, per_group=300, seed=11), data)
    write_weight_table(calibration_table(Calibration.GENDER), weights)
    return data, weights


@pytest.fixture
def age_fixture(tmp_path):
    data, weights = tmp_path / 'survey.csv', tmp_path / 'weights.csv'
    write_microdata(synthesize_microdata(Calibration.AGE, per_group=300, seed=5), data)
    write_weight_table(calibration_table(Calibration.AGE), weights)
    return data, weights
