import math
from typing import Union

from attrs import field, frozen

from mixingweights.utils.exceptions import DomainError

_SQRT2: float = math.sqrt(2.0)
_SQRT2PI: float = math.sqrt(2.0 * math.pi)

# rational approximation coefficients for the inverse normal CDF (Acklam)
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW: float = 0.02425
_NEWTON_STEPS: int = 2


def _check_probability(instance, attribute, value):
    if not (isinstance(value, (int, float)) and 0.0 < value < 1.0):
        raise DomainError(f'{attribute.name} must lie in the open interval (0, 1), got {value!r}.')


@frozen
class Level:
    """Type I error level r of a two-sided test.

    Attributes
    ----------
    r: float
        Probability in the open interval (0, 1).
    """
    r: float = field(converter=float, validator=_check_probability)


def as_level(level: Union[Level, float]) -> Level:
    """Returns level as a Level, wrapping a bare probability."""
    return level if isinstance(level, Level) else Level(level)


def std_normal_pdf(x: float) -> float:
    """Density of the standard normal law at x."""
    return math.exp(-0.5 * x * x) / _SQRT2PI


def std_normal_cdf(x: float) -> float:
    """This returns Φ(x), the standard normal cumulative distribution function.

    The complementary error function is used on the whole line, so both tails keep full
    relative precision.

    Parameters
    ----------
    x: float
        Finite real.

    Returns
    -------
    float
        Φ(x) in [0, 1].

    Raises
    ------
    DomainError
        If x is NaN or infinite.

    Examples
    --------
    >>> std_normal_cdf(0.0)
    0.5

    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f'std_normal_cdf needs a finite argument, got {x!r}.')
    return 0.5 * math.erfc(-x / _SQRT2)


def _acklam_lower(p: float) -> float:
    """Initial quantile guess for 0 < p <= 0.5 (absolute error about 1e-9)."""
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
            ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    q = p - 0.5
    r = q * q
    return (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / \
        (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)


def _lower_quantile(p: float) -> float:
    """Quantile for a lower-tail probability p in (0, 0.5], refined by Newton steps on Φ."""
    x = _acklam_lower(p)
    for _ in range(_NEWTON_STEPS):
        x -= (std_normal_cdf(x) - p) / std_normal_pdf(x)
    return x


def std_normal_quantile(p: float) -> float:
    """This returns the quantile Φ^{-1}(p) of the standard normal law.

    Parameters
    ----------
    p: float
        Probability in the open interval (0, 1).

    Returns
    -------
    float
        x such that Φ(x) = p.

    Raises
    ------
    DomainError
        If p is outside (0, 1).

    Notes
    -----
    .. [1] Acklam's rational approximation gives the starting point; two Newton steps against
       std_normal_cdf bring the agreement Φ(x) = p to about machine precision. Upper-tail
       probabilities are handled through the symmetry Φ^{-1}(p) = -Φ^{-1}(1 - p).

    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f'quantile needs a probability in (0, 1), got {p!r}.')
    if p <= 0.5:
        return _lower_quantile(p)
    return -_lower_quantile(1.0 - p)


def critical_value(level: Union[Level, float]) -> float:
    """This returns q_r, the quantile of order 1 - r/2 of the standard normal law.

    Parameters
    ----------
    level: Level or float
        Type I error level r.

    Returns
    -------
    float
        Critical value of the two-sided test at level r (about 1.96 for r = 0.05).

    Examples
    --------
    >>> round(critical_value(0.05), 6)
    1.959964

    """
    r = as_level(level).r
    # the upper tail r/2 is represented exactly, 1 - r/2 would lose bits
    return -_lower_quantile(r / 2.0)


def two_sided_p_value(t: float) -> float:
    """This returns the two-sided p-value 2(1 - Φ(t)) of a nonnegative statistic.

    Parameters
    ----------
    t: float
        Nonnegative statistic (absolute value of an asymptotically standard normal quantity).

    Returns
    -------
    float
        p-value in [0, 1].

    Raises
    ------
    DomainError
        If t is negative or not finite.

    """
    t = float(t)
    if not math.isfinite(t) or t < 0.0:
        raise DomainError(f'two_sided_p_value needs a finite nonnegative statistic, got {t!r}.')
    return math.erfc(t / _SQRT2)
