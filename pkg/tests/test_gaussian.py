import math

import pytest
import hypothesis.strategies as st
from hypothesis import given
from scipy import stats

from mixingweights.gaussian import (Level, critical_value, std_normal_cdf, std_normal_pdf, std_normal_quantile,
                                    two_sided_p_value)
from mixingweights.utils import DomainError


def test_cdf_reference_points():
    assert std_normal_cdf(0.0) == 0.5
    assert std_normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-6)
    assert std_normal_cdf(-2.5) + std_normal_cdf(2.5) == pytest.approx(1.0, abs=1e-15)


@given(st.floats(min_value=-37.0, max_value=37.0))
def test_cdf_matches_scipy(x):
    assert std_normal_cdf(x) == pytest.approx(stats.norm.cdf(x), rel=1e-12, abs=1e-300)


def test_cdf_keeps_precision_in_the_far_tail():
    assert std_normal_cdf(-30.0) == pytest.approx(stats.norm.cdf(-30.0), rel=1e-10)
    assert std_normal_cdf(-30.0) > 0.0


@pytest.mark.parametrize('x', [math.nan, math.inf, -math.inf])
def test_cdf_rejects_non_finite(x):
    with pytest.raises(DomainError):
        std_normal_cdf(x)


def test_pdf_at_zero():
    assert std_normal_pdf(0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-15)


@given(st.floats(min_value=1e-300, max_value=1.0, exclude_max=True))
def test_quantile_inverts_cdf(p):
    x = std_normal_quantile(p)
    assert x == pytest.approx(stats.norm.ppf(p), rel=1e-9, abs=1e-12)


@pytest.mark.parametrize('p', [0.0, 1.0, -0.1, 1.5, math.nan])
def test_quantile_domain(p):
    with pytest.raises(DomainError):
        std_normal_quantile(p)


def test_critical_values():
    assert critical_value(0.05) == pytest.approx(1.959964, abs=1e-6)
    assert critical_value(0.1) == pytest.approx(1.6449, abs=1e-4)
    assert critical_value(Level(0.999999)) == pytest.approx(0.0, abs=1e-5)


@given(st.floats(min_value=1e-12, max_value=0.999))
def test_critical_value_is_the_upper_quantile(r):
    assert critical_value(r) == pytest.approx(stats.norm.isf(r / 2.0), rel=1e-9, abs=1e-12)


def test_critical_value_decreases_with_the_level():
    levels = [0.001, 0.01, 0.05, 0.1, 0.2, 0.5]
    values = [critical_value(r) for r in levels]
    assert values == sorted(values, reverse=True)


@pytest.mark.parametrize('r', [0.0, 1.0, -0.05, 2.0])
def test_level_domain(r):
    with pytest.raises(DomainError):
        Level(r)


def test_p_values():
    assert two_sided_p_value(0.0) == 1.0
    assert two_sided_p_value(1.96) == pytest.approx(0.05, abs=1e-4)
    assert two_sided_p_value(1.2816) == pytest.approx(0.2, abs=1e-4)


@given(st.floats(min_value=1e-6, max_value=0.999))
def test_p_value_at_the_critical_value_is_the_level(r):
    assert two_sided_p_value(critical_value(r)) == pytest.approx(r, rel=1e-9)


@pytest.mark.parametrize('t', [-0.1, math.nan, math.inf])
def test_p_value_domain(t):
    with pytest.raises(DomainError):
        two_sided_p_value(t)
