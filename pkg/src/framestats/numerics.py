"""Scalar special functions backing the statistical machinery.

Provides the log-gamma function, the chi-squared survival function (via
the regularized incomplete gamma function), Kummer's confluent
hypergeometric function M(a, b, x) with its derivative, and the
modified Bessel function I0.  Everything is scalar float64; inputs are
validated and out-of-domain arguments raise :class:`DomainError`.

M(a, b, x) is summed by its Taylor series for x >= 0.  For x < 0 the
Kummer transform ``M(a, b, x) = exp(x) * M(b - a, b, -x)`` is applied
first so the series keeps positive terms and avoids the catastrophic
cancellation of the alternating series.  Series terminate once three
consecutive terms contribute less than 1e-16 relative to the running
sum, with a hard cap of 10,000 terms.
"""

import math
import operator
from dataclasses import dataclass

from .exceptions import ConvergenceError, DomainError


def _as_df(df):
    """Validate an integer-like degrees-of-freedom argument."""
    try:
        df = operator.index(df)
    except TypeError:
        raise DomainError(f"df must be a positive integer, got {df!r}") from None
    if df < 1:
        raise DomainError(f"df must be a positive integer, got {df!r}")
    return df

#: Largest |x| accepted by kummer_m / bessel_i0; beyond this the Taylor
#: series would need rescaling that the package does not implement.
KUMMER_MAX_ABS_X = 500.0

_SERIES_RTOL = 1e-16
_SERIES_STREAK = 3
_SERIES_CAP = 10_000


@dataclass(frozen=True)
class ChiSquared:
    """Chi-squared reference distribution with `df` degrees of freedom."""

    df: int

    def __post_init__(self):
        object.__setattr__(self, "df", _as_df(self.df))

    def sf(self, x):
        """Survival function P(X > x)."""
        return chi2_sf(x, self.df)


def ln_gamma(x):
    """Natural log of the Gamma function for x > 0.

    Parameters
    ----------
    x : float
        Strictly positive argument.

    Returns
    -------
    float
        ln Gamma(x).
    """
    if not x > 0.0:
        raise DomainError(f"ln_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def _lower_gamma_series(a, x):
    """Regularized lower incomplete gamma P(a, x) by power series."""
    if x == 0.0:
        return 0.0
    term = 1.0 / a
    total = term
    denom = a
    for _ in range(_SERIES_CAP):
        denom += 1.0
        term *= x / denom
        total += term
        if abs(term) < abs(total) * 1e-17:
            return total * math.exp(a * math.log(x) - x - math.lgamma(a))
    raise ConvergenceError("incomplete gamma series did not converge")


def _upper_gamma_cf(a, x):
    """Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _SERIES_CAP):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h * math.exp(a * math.log(x) - x - math.lgamma(a))
    raise ConvergenceError("incomplete gamma continued fraction did not converge")


def chi2_sf(x, df):
    """Chi-squared survival function P(chi2_df > x).

    Evaluates the regularized upper incomplete gamma function
    Q(df/2, x/2), switching between the continued-fraction form (x > df)
    and one minus the lower series (x <= df).

    Parameters
    ----------
    x : float
        Test statistic value, must be nonnegative.
    df : int
        Degrees of freedom, at least 1.

    Returns
    -------
    float
        Tail probability in [0, 1].
    """
    df = _as_df(df)
    if not x >= 0.0:
        raise DomainError(f"chi2_sf requires x >= 0, got {x!r}")
    if x == 0.0:
        return 1.0
    a = 0.5 * df
    if x > df:
        return min(1.0, max(0.0, _upper_gamma_cf(a, 0.5 * x)))
    return min(1.0, max(0.0, 1.0 - _lower_gamma_series(a, 0.5 * x)))


def _kummer_series(a, b, x):
    """Taylor series for M(a, b, x); meant for x >= 0."""
    term = 1.0
    total = 1.0
    streak = 0
    for k in range(_SERIES_CAP):
        term *= (a + k) * x / ((b + k) * (k + 1.0))
        total += term
        if abs(term) < abs(total) * _SERIES_RTOL:
            streak += 1
            if streak >= _SERIES_STREAK:
                return total
        else:
            streak = 0
    raise ConvergenceError(
        f"Kummer series hit the {_SERIES_CAP}-term cap at a={a}, b={b}, x={x}"
    )


def kummer_m(a, b, x):
    """Kummer's confluent hypergeometric function M(a, b, x).

    Parameters
    ----------
    a : float
        Numerator parameter.
    b : float
        Denominator parameter, must be positive.
    x : float
        Argument with |x| <= 500 (supported range).

    Returns
    -------
    float
        M(a, b, x) = sum_k (a)_k x^k / ((b)_k k!).
    """
    if not b > 0.0:
        raise DomainError(f"kummer_m requires b > 0, got b={b!r}")
    if not abs(x) <= KUMMER_MAX_ABS_X:
        raise DomainError(
            f"kummer_m supports |x| <= {KUMMER_MAX_ABS_X:g}, got x={x!r}"
        )
    if x < 0.0:
        return math.exp(x) * _kummer_series(b - a, b, -x)
    return _kummer_series(a, b, x)


def kummer_m_dx(a, b, x):
    """Derivative d/dx M(a, b, x), via term-wise series differentiation.

    Differentiating the series term by term gives
    (a/b) * M(a+1, b+1, x) exactly.
    """
    return (a / b) * kummer_m(a + 1.0, b + 1.0, x)


def bessel_i0(x):
    """Modified Bessel function of the first kind, order zero.

    Parameters
    ----------
    x : float
        Argument with |x| <= 500.

    Returns
    -------
    float
        I0(x) = sum_k (x^2/4)^k / (k!)^2.
    """
    if not abs(x) <= KUMMER_MAX_ABS_X:
        raise DomainError(
            f"bessel_i0 supports |x| <= {KUMMER_MAX_ABS_X:g}, got x={x!r}"
        )
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    streak = 0
    for k in range(_SERIES_CAP):
        term *= q / ((k + 1.0) * (k + 1.0))
        total += term
        if term < total * _SERIES_RTOL:
            streak += 1
            if streak >= _SERIES_STREAK:
                return total
        else:
            streak = 0
    raise ConvergenceError(f"I0 series hit the {_SERIES_CAP}-term cap at x={x}")
