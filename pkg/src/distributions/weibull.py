"""
Weibull distribution module for the Pythagorean Weibull toolkit.

This module implements the three-parameter Weibull law used to model runs
scored and allowed per game: density, distribution and survival functions,
moments, inverse-CDF sampling, the probability that one Weibull exceeds an
independent second one, and the Pythagorean won-loss formula that follows.

All moment formulas go through log_gamma to avoid overflow for small gamma.
"""
import math
from typing import Optional, Union

import numpy as np

from src.distributions.special import log_gamma
from src.models import MatchedPair, WeibullParams
from src.utils.errors import DomainError, MismatchedParametersError


ArrayLike = Union[float, np.ndarray]


def _require_finite(x: float, name: str = "x") -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    return x


def pdf(x: float, p: WeibullParams) -> float:
    """
    Probability density of a three-parameter Weibull.

    Args:
        x: Point of evaluation
        p: Distribution parameters

    Returns:
        (gamma/alpha) z^(gamma-1) exp(-z^gamma) with z = (x - beta)/alpha for
        x >= beta, and 0 below the support
    """
    x = _require_finite(x)
    if x < p.beta:
        return 0.0
    z = (x - p.beta) / p.alpha
    if z == 0.0:
        if p.gamma == 1.0:
            return 1.0 / p.alpha
        return 0.0 if p.gamma > 1.0 else math.inf
    return (p.gamma / p.alpha) * z ** (p.gamma - 1.0) * math.exp(-(z ** p.gamma))


def cdf(x: float, p: WeibullParams) -> float:
    """Prob(X <= x): 0 up to beta, 1 - exp(-((x - beta)/alpha)^gamma) above."""
    x = _require_finite(x)
    if x <= p.beta:
        return 0.0
    return -math.expm1(-(((x - p.beta) / p.alpha) ** p.gamma))


def survival(x: float, p: WeibullParams) -> float:
    """Prob(X > x); accepts x = +inf."""
    if math.isnan(x):
        raise DomainError("survival of NaN")
    if x <= p.beta:
        return 1.0
    if math.isinf(x):
        return 0.0
    return math.exp(-(((x - p.beta) / p.alpha) ** p.gamma))


def survival_array(x: np.ndarray, p: WeibullParams) -> np.ndarray:
    """Vectorised survival function; +inf maps to 0."""
    x = np.asarray(x, dtype=float)
    z = np.clip((x - p.beta) / p.alpha, 0.0, None)
    with np.errstate(over="ignore"):
        return np.exp(-np.power(z, p.gamma))


def quantile(u: ArrayLike, p: WeibullParams) -> ArrayLike:
    """
    Inverse CDF for u in [0, 1).

    Uses -log1p(-u) so that u = 0 maps exactly to beta.
    """
    arr = np.asarray(u, dtype=float)
    if np.any((arr < 0.0) | (arr >= 1.0)) or np.any(np.isnan(arr)):
        raise DomainError("quantile requires u in [0, 1)")
    values = p.beta + p.alpha * np.power(-np.log1p(-arr), 1.0 / p.gamma)
    if np.ndim(u) == 0:
        return float(values)
    return values


def sample(p: WeibullParams, rng: np.random.Generator, size: Optional[int] = None) -> ArrayLike:
    """
    Draw from the distribution by inverse-CDF sampling.

    Args:
        p: Distribution parameters
        rng: Caller-owned numpy random generator
        size: Number of draws; a single float when omitted

    Returns:
        One draw or an array of draws
    """
    return quantile(rng.random(size), p)


def mean(p: WeibullParams) -> float:
    """alpha Gamma(1 + 1/gamma) + beta."""
    return p.alpha * math.exp(log_gamma(1.0 + 1.0 / p.gamma)) + p.beta


def variance(p: WeibullParams) -> float:
    """alpha^2 Gamma(1 + 2/gamma) - alpha^2 Gamma(1 + 1/gamma)^2."""
    g1 = math.exp(2.0 * log_gamma(1.0 + 1.0 / p.gamma))
    g2 = math.exp(log_gamma(1.0 + 2.0 / p.gamma))
    return max(p.alpha ** 2 * (g2 - g1), 0.0)


def alpha_from_mean(mean_value: float, beta: float, gamma: float) -> float:
    """
    Scale giving a Weibull with translation beta and shape gamma the requested mean.

    Args:
        mean_value: Target mean, strictly above beta
        beta: Translation
        gamma: Shape, strictly positive

    Returns:
        (mean - beta) / Gamma(1 + 1/gamma)
    """
    mean_value = _require_finite(mean_value, "mean")
    beta = _require_finite(beta, "beta")
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    if mean_value <= beta:
        raise DomainError(f"mean {mean_value} must exceed beta {beta}")
    return (mean_value - beta) / math.exp(log_gamma(1.0 + 1.0 / gamma))


def pythagorean_ratio(a: float, b: float, gamma: float) -> float:
    """
    a^gamma / (a^gamma + b^gamma) for positive a and b.

    Unlike won_loss_percentage this does not check gamma, so the ratio can be
    evaluated at any real exponent (including gamma <= 0, where the Weibull
    reading no longer holds).
    """
    return 1.0 / (1.0 + (b / a) ** gamma)


def prob_exceeds(pair: MatchedPair) -> float:
    """
    Prob(X > Y) for independent X ~ pair.scored and Y ~ pair.allowed.

    Returns:
        alpha_RS^gamma / (alpha_RS^gamma + alpha_RA^gamma)
    """
    scored, allowed = pair.scored, pair.allowed
    if scored.beta != allowed.beta or scored.gamma != allowed.gamma:
        raise MismatchedParametersError("prob_exceeds needs a shared beta and gamma")
    return pythagorean_ratio(scored.alpha, allowed.alpha, scored.gamma)


def matched_pair_from_means(rs_mean: float, ra_mean: float, beta: float, gamma: float) -> MatchedPair:
    """Build the scored/allowed pair whose means are rs_mean and ra_mean."""
    return MatchedPair(
        scored=WeibullParams(alpha=alpha_from_mean(rs_mean, beta, gamma), beta=beta, gamma=gamma),
        allowed=WeibullParams(alpha=alpha_from_mean(ra_mean, beta, gamma), beta=beta, gamma=gamma),
    )


def won_loss_percentage(rs_mean: float, ra_mean: float, beta: float, gamma: float) -> float:
    """
    Pythagorean won-loss percentage.

    Args:
        rs_mean: Mean of the runs-scored Weibull
        ra_mean: Mean of the runs-allowed Weibull
        beta: Shared translation
        gamma: Shared shape, strictly positive

    Returns:
        (RS - beta)^gamma / ((RS - beta)^gamma + (RA - beta)^gamma)
    """
    rs_mean = _require_finite(rs_mean, "rs_mean")
    ra_mean = _require_finite(ra_mean, "ra_mean")
    beta = _require_finite(beta, "beta")
    if not (math.isfinite(gamma) and gamma > 0):
        raise DomainError(f"gamma must be positive, got {gamma}")
    if rs_mean <= beta or ra_mean <= beta:
        raise DomainError(f"means ({rs_mean}, {ra_mean}) must exceed beta {beta}")
    return pythagorean_ratio(rs_mean - beta, ra_mean - beta, gamma)
