"""
Special functions module for the Pythagorean Weibull toolkit.

This module provides the Gamma function in log space, the regularized
incomplete gamma functions, and the chi-square and standard normal tail
functions that back every test report.

The incomplete gamma evaluation follows the classic split: a power series
below a + 1 and a Lentz continued fraction above it.
"""
import math
import sys
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from src.utils.errors import DomainError, PythagoreanError


# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_TWO_PI = 0.9189385332046727417803297

_SERIES_ACCURACY = 1.0e-15
_MAX_TERMS = 100000
_TINY = sys.float_info.min / sys.float_info.epsilon


def log_gamma(s: float) -> float:
    """
    Natural logarithm of the Gamma function for real s > 0.

    Args:
        s: Positive argument

    Returns:
        ln Gamma(s)
    """
    s = float(s)
    if not math.isfinite(s) or s <= 0.0:
        raise DomainError(f"log_gamma requires a finite s > 0, got {s}")
    if s < 0.5:
        # reflection: Gamma(s) Gamma(1 - s) = pi / sin(pi s)
        return math.log(math.pi / math.sin(math.pi * s)) - log_gamma(1.0 - s)
    x = s - 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, coeff in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += coeff / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (x + 0.5) * math.log(t) - t + math.log(acc)


def gamma_function(s: float) -> float:
    """Gamma(s) evaluated as exp(log_gamma(s))."""
    return math.exp(log_gamma(s))


def _check_incomplete_args(a: float, x: float) -> None:
    if not a > 0.0 or not math.isfinite(a):
        raise DomainError(f"incomplete gamma requires a > 0, got {a}")
    if x < 0.0 or math.isnan(x):
        raise DomainError(f"incomplete gamma requires x >= 0, got {x}")


def _lower_series(a: float, x: float) -> float:
    """P(a, x) by its power series; converges fast for x < a + 1."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_TERMS):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _SERIES_ACCURACY:
            return total * math.exp(-x + a * math.log(x) - log_gamma(a))
    raise PythagoreanError(f"incomplete gamma series did not converge for a={a}, x={x}")


def _upper_continued_fraction(a: float, x: float) -> float:
    """Q(a, x) by the modified Lentz continued fraction; for x >= a + 1."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_TERMS):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _SERIES_ACCURACY:
            return math.exp(-x + a * math.log(x) - log_gamma(a)) * h
    raise PythagoreanError(f"incomplete gamma continued fraction did not converge for a={a}, x={x}")


def regularized_gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    _check_incomplete_args(a, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return _lower_series(a, x)
    return 1.0 - _upper_continued_fraction(a, x)


def regularized_gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    _check_incomplete_args(a, x)
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return 1.0 - _lower_series(a, x)
    return _upper_continued_fraction(a, x)


def _check_dof(dof: int) -> None:
    if int(dof) != dof or dof < 1:
        raise DomainError(f"degrees of freedom must be a positive integer, got {dof}")


def chi_square_sf(x: float, dof: int) -> float:
    """
    Survival function of the chi-square distribution.

    Args:
        x: Nonnegative statistic value
        dof: Degrees of freedom (>= 1)

    Returns:
        Prob(X > x) for X ~ chi-square(dof)
    """
    _check_dof(dof)
    if x < 0 or math.isnan(x):
        raise DomainError(f"chi-square statistic must be nonnegative, got {x}")
    return regularized_gamma_q(dof / 2.0, x / 2.0)


def chi_square_cdf(x: float, dof: int) -> float:
    """Cumulative distribution function of the chi-square distribution."""
    _check_dof(dof)
    if x < 0 or math.isnan(x):
        raise DomainError(f"chi-square statistic must be nonnegative, got {x}")
    return regularized_gamma_p(dof / 2.0, x / 2.0)


def _invert_decreasing_tail(tail: Callable[[float], float], q: float, lo: float, hi: float) -> float:
    """Solve tail(x) = q on [lo, inf) for a decreasing tail function, in log space."""
    log_q = math.log(q)

    def objective(x: float) -> float:
        return math.log(max(tail(x), 1e-300)) - log_q

    while objective(hi) > 0:
        hi *= 2.0
    return brentq(objective, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)


def chi_square_isf(q: float, dof: int) -> float:
    """Inverse survival function: x with chi_square_sf(x, dof) = q."""
    _check_dof(dof)
    if not 0.0 < q < 1.0:
        raise DomainError(f"tail probability must lie in (0, 1), got {q}")
    return _invert_decreasing_tail(lambda x: chi_square_sf(x, dof), q, 0.0, dof + 10.0)


def chi_square_quantile(p: float, dof: int) -> float:
    """
    Lower quantile: x with chi_square_cdf(x, dof) = p.

    The 95% critical threshold for 20 degrees of freedom is
    chi_square_quantile(0.95, 20).
    """
    _check_dof(dof)
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p}")
    if p > 0.5:
        return chi_square_isf(1.0 - p, dof)

    def objective(x: float) -> float:
        return math.log(max(chi_square_cdf(x, dof), 1e-300)) - math.log(p)

    hi = float(dof)
    while objective(hi) < 0:
        hi *= 2.0
    return brentq(objective, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def normal_sf(z: float) -> float:
    """Upper tail of the standard normal distribution."""
    if math.isnan(z):
        raise DomainError("normal_sf of NaN")
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def normal_cdf(z: float) -> float:
    """Standard normal cumulative distribution function."""
    if math.isnan(z):
        raise DomainError("normal_cdf of NaN")
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def normal_isf(q: float) -> float:
    """z with normal_sf(z) = q."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"tail probability must lie in (0, 1), got {q}")
    if q > 0.5:
        return -normal_isf(1.0 - q)
    if q == 0.5:
        return 0.0
    return _invert_decreasing_tail(normal_sf, q, 0.0, 8.0)


def normal_quantile(p: float) -> float:
    """z with normal_cdf(z) = p."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p}")
    return -normal_isf(p)
