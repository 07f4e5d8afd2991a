"""
Binning module for the Pythagorean Weibull toolkit.

This module builds the two bin layouts used in the analysis (half-integer
fit bins that centre integer scores, and integer independence bins),
histograms of observed scores, and the Weibull mass assigned to each bin.
"""
import math
from typing import Iterable, List, Sequence

import numpy as np

from src.distributions.weibull import survival_array
from src.models import BinScheme, GofDof, SchemeLabel, ScoreHistogram, WeibullParams
from src.utils.errors import BinIndexError, DomainError


# Parameters estimated by a team fit: alpha_RS, alpha_RA, gamma
ESTIMATED_PARAMETERS = 3


def fit_bins() -> BinScheme:
    """
    Bins [-.5, .5], [.5, 1.5], ..., [8.5, 9.5], [9.5, 11.5], [11.5, inf).

    Scores 0-9 get a bin each, 10 and 11 share one, and 12 or more share the
    last. Edges are half-integral, so endpoint openness never matters.
    """
    edges = [k - 0.5 for k in range(11)] + [11.5, math.inf]
    return BinScheme(edges=tuple(edges), label=SchemeLabel.FIT_BINS)


def independence_bins(variant: int = 12) -> BinScheme:
    """
    Integer bins [0, 1), ..., [variant - 2, variant - 1), [variant - 1, inf).

    Args:
        variant: 12 for the standard table, 13 to split off [12, inf)

    Returns:
        Left-closed, right-open bin scheme
    """
    if variant not in (12, 13):
        raise DomainError(f"independence bins come in 12 or 13 bins, got {variant}")
    edges = [float(k) for k in range(variant)] + [math.inf]
    label = SchemeLabel.INDEP_BINS if variant == 12 else SchemeLabel.INDEP_BINS_13
    return BinScheme(edges=tuple(edges), label=label)


def custom_scheme(edges: Sequence[float]) -> BinScheme:
    """Any strictly increasing edge list ending at +inf."""
    return BinScheme(edges=tuple(float(e) for e in edges), label=SchemeLabel.CUSTOM)


def _indices(scores: np.ndarray, scheme: BinScheme) -> np.ndarray:
    idx = np.searchsorted(np.asarray(scheme.edges), scores, side="right") - 1
    if np.any(idx < 0):
        bad = scores[idx < 0][0]
        raise BinIndexError(f"score {bad} lies below the first edge {scheme.edges[0]}")
    return idx


def bin_index(score: float, scheme: BinScheme) -> int:
    """Index of the unique bin containing score."""
    return int(_indices(np.asarray([score], dtype=float), scheme)[0])


def histogram(scores: Iterable[int], scheme: BinScheme) -> ScoreHistogram:
    """
    Count scores per bin.

    Args:
        scores: Nonnegative integer scores
        scheme: Bin layout

    Returns:
        Histogram whose total equals the number of scores
    """
    values = np.asarray(list(scores), dtype=float)
    if values.size and np.any(values < 0):
        raise DomainError("scores must be nonnegative")
    if values.size == 0:
        counts: List[int] = [0] * scheme.n_bins
    else:
        counts = np.bincount(_indices(values, scheme), minlength=scheme.n_bins).tolist()
    return ScoreHistogram(scheme=scheme, counts=tuple(int(c) for c in counts), total=int(values.size))


def bin_probabilities(p: WeibullParams, scheme: BinScheme) -> np.ndarray:
    """Weibull mass of every bin: S(left) - S(right), with S(inf) = 0."""
    s = survival_array(np.asarray(scheme.edges, dtype=float), p)
    return s[:-1] - s[1:]


def bin_probability(p: WeibullParams, scheme: BinScheme, k: int) -> float:
    """
    Weibull mass of bin k: cdf(right) - cdf(left), or 1 - cdf(left) for the last bin.
    """
    if not 0 <= k < scheme.n_bins:
        raise BinIndexError(f"bin index {k} outside 0..{scheme.n_bins - 1}")
    return float(bin_probabilities(p, scheme)[k])


def bin_centers(scheme: BinScheme) -> List[float]:
    """Midpoint of each bin; the unbounded last bin uses its left edge + 0.5."""
    centers = [(a + b) / 2.0 for a, b in zip(scheme.edges[:-2], scheme.edges[1:-1])]
    centers.append(scheme.edges[-2] + 0.5)
    return centers


def gof_degrees_of_freedom(n_bins: int, interpretation: GofDof = GofDof.LITERAL) -> int:
    """
    Degrees of freedom 2(#Bins - 1) - 1 - 3 of the two-sided Pearson statistic.

    LITERAL counts the bins actually used (18 for the 12 fit bins); PUBLISHED
    counts one more, reproducing the published 20. ASYMPTOTIC drops the extra
    -1 and gives the large-sample value for two multinomials sharing three
    fitted parameters, 2(#Bins - 1) - 3 (19 for the fit bins).
    """
    if interpretation == GofDof.ASYMPTOTIC:
        dof = 2 * (n_bins - 1) - ESTIMATED_PARAMETERS
    else:
        bins = n_bins + 1 if interpretation == GofDof.PUBLISHED else n_bins
        dof = 2 * (bins - 1) - 1 - ESTIMATED_PARAMETERS
    if dof < 1:
        raise DomainError(f"{n_bins} bins leave no degrees of freedom")
    return dof
