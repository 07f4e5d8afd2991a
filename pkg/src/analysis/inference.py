"""
Inference module for the Pythagorean Weibull toolkit.

This module holds the test battery applied to every fitted team:

- Pearson chi-square goodness of fit of the binned scores against the fitted Weibulls
- quasi-independence of runs scored and allowed on an incomplete contingency
  table whose diagonal is structurally zero, with expected counts from
  iterative proportional fitting
- z-tests of observed against predicted mean runs
- Bonferroni-adjusted critical thresholds for simultaneous comparisons
"""
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.analysis.binning import bin_probabilities, gof_degrees_of_freedom, independence_bins
from src.config import settings
from src.distributions.special import (  # noqa: F401  (re-exported test tails)
    chi_square_cdf,
    chi_square_isf,
    chi_square_quantile,
    chi_square_sf,
    normal_cdf,
    normal_isf,
    normal_quantile,
    normal_sf,
)
from src.models import (
    BinScheme,
    ContingencyTable,
    FitResult,
    GameRecord,
    GofDof,
    ScoreHistogram,
    TeamSeason,
    TestReport,
    ZCentering,
)
from src.utils.errors import (
    DegenerateModelError,
    DomainError,
    EmptyMarginError,
    FitFailedError,
    HistogramMismatchError,
    IPFConvergenceError,
    StructuralZeroError,
)
from src.utils.logging import get_logger


logger = get_logger(__name__)

CONFIDENCE_LEVELS = (0.95, 0.99)
MIN_Z_TEST_GAMES = 30
INDEPENDENCE = "independence"


def bonferroni_adjust(level: float, comparisons: int, dof: Optional[int] = None) -> float:
    """
    Critical threshold after dividing the significance level by the number of comparisons.

    Args:
        level: Confidence level, e.g. 0.95
        comparisons: Number of simultaneous tests (>= 1)
        dof: Chi-square degrees of freedom; None selects the two-sided standard normal

    Returns:
        Upper critical value at significance (1 - level) / comparisons
    """
    if comparisons < 1:
        raise DomainError("comparisons must be at least 1")
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {level}")
    significance = (1.0 - level) / comparisons
    if dof is None:
        return normal_isf(significance / 2.0)
    return chi_square_isf(significance, dof)


def familywise_error_rate(level: float, comparisons: int) -> float:
    """Chance of at least one false rejection among independent tests: 1 - level^m."""
    if comparisons < 1:
        raise DomainError("comparisons must be at least 1")
    return 1.0 - level ** comparisons


def _thresholds(comparisons: int, dof: Optional[int]) -> Dict[str, float]:
    thresholds: Dict[str, float] = {}
    for level in CONFIDENCE_LEVELS:
        thresholds[f"{level}"] = bonferroni_adjust(level, 1, dof)
        thresholds[f"bonferroni_{level}"] = bonferroni_adjust(level, comparisons, dof)
    return thresholds


def _chi_square_report(
    name: str,
    statistic: float,
    dof: int,
    comparisons: int,
    team: Optional[str] = None,
    details: Optional[Dict[str, float]] = None,
) -> TestReport:
    thresholds = _thresholds(comparisons, dof)
    return TestReport(
        name=name,
        team=team,
        distribution="chi2",
        statistic=statistic,
        dof=dof,
        p_value=chi_square_sf(statistic, dof),
        thresholds=thresholds,
        reject={key: statistic > value for key, value in thresholds.items()},
        details=details or {},
    )


def gof_statistic(
    rs_hist: ScoreHistogram,
    ra_hist: ScoreHistogram,
    fit: FitResult,
    beta: Optional[float] = None,
    interpretation: GofDof = GofDof.LITERAL,
    comparisons: int = settings.BONFERRONI_COMPARISONS,
) -> TestReport:
    """
    Pearson chi-square of observed bin counts against #Games times the fitted bin masses.

    Args:
        rs_hist: Runs-scored histogram
        ra_hist: Runs-allowed histogram
        fit: Fitted parameters
        beta: Translation; defaults to the fit's
        interpretation: How degrees of freedom are counted
        comparisons: Tests in the Bonferroni family

    Returns:
        Chi-square report summing both sides
    """
    if rs_hist.scheme != ra_hist.scheme or rs_hist.total != ra_hist.total:
        raise HistogramMismatchError("scored and allowed histograms must share scheme and total")
    beta = fit.beta if beta is None else beta
    games = rs_hist.total
    parts = []
    for side, hist, params in (("scored", rs_hist, fit.scored_params()), ("allowed", ra_hist, fit.allowed_params())):
        if params.beta != beta:
            params = params.model_copy(update={"beta": beta})
        expected = games * bin_probabilities(params, hist.scheme)
        zero = np.flatnonzero(expected <= 0)
        if zero.size:
            k = int(zero[0])
            raise DegenerateModelError(f"expected {side} count in bin {k} is zero", bin_index=k)
        parts.append(float(np.sum((hist.as_array() - expected) ** 2 / expected)))
    dof = gof_degrees_of_freedom(rs_hist.scheme.n_bins, interpretation)
    return _chi_square_report(
        "goodness_of_fit",
        parts[0] + parts[1],
        dof,
        comparisons,
        team=fit.team or None,
        details={"scored": parts[0], "allowed": parts[1]},
    )


def cap_scores(games: Sequence[GameRecord], cap: int) -> List[GameRecord]:
    """
    Replace every score above cap with cap.

    Capped records may coincide (e.g. 12-11 becomes 11-11); build_table with
    drop_masked=True sets those aside.
    """
    if cap < 1:
        raise DomainError("cap must be at least 1")
    capped = []
    for game in games:
        if game.runs_scored > cap or game.runs_allowed > cap:
            game = game.model_copy(
                update={"runs_scored": min(game.runs_scored, cap), "runs_allowed": min(game.runs_allowed, cap)}
            )
        capped.append(game)
    return capped


def build_table(games: Sequence[GameRecord], scheme: BinScheme, drop_masked: bool = False) -> ContingencyTable:
    """
    Cross-tabulate runs scored (rows) against runs allowed (columns).

    Args:
        games: Tie-free games
        scheme: Bins used for both axes; the diagonal is structurally zero
        drop_masked: Exclude games on the diagonal instead of rejecting them

    Returns:
        Contingency table with diagonal mask and the number of excluded games
    """
    size = scheme.n_bins
    edges = np.asarray(scheme.edges)
    counts = np.zeros((size, size), dtype=int)
    excluded = 0
    for game in games:
        r = int(np.searchsorted(edges, game.runs_scored, side="right") - 1)
        c = int(np.searchsorted(edges, game.runs_allowed, side="right") - 1)
        if r < 0 or c < 0:
            raise DomainError(f"score below the first edge in game on {game.date}")
        if r == c:
            if not drop_masked:
                raise StructuralZeroError(
                    f"game on {game.date} ({game.runs_scored}-{game.runs_allowed}) lands on "
                    f"structural zero ({r}, {c}); cap scores and drop coinciding games first",
                    row=r,
                    col=c,
                )
            excluded += 1
            continue
        counts[r, c] += 1
    mask = np.eye(size, dtype=bool)
    return ContingencyTable(
        counts=tuple(tuple(int(v) for v in row) for row in counts),
        mask=tuple(tuple(bool(v) for v in row) for row in mask),
        label=scheme.label,
        excluded=excluded,
    )


def ipf_expected(
    table: ContingencyTable,
    tol: float = settings.IPF_TOLERANCE,
    max_iters: int = settings.IPF_MAX_ITERS,
) -> np.ndarray:
    """
    Quasi-independence expected counts by iterative proportional fitting.

    Starting from 1 off the mask and 0 on it, alternately rescale rows to the
    observed row totals and columns to the observed column totals until no
    cell moves by more than tol over a full row+column cycle.

    Args:
        table: Observed counts and structural-zero mask
        tol: Maximum absolute cell change at convergence
        max_iters: Maximum number of row+column cycles

    Returns:
        Expected counts, exactly zero on masked cells
    """
    observed = table.as_array()
    mask = table.mask_array()
    rows, cols = observed.sum(axis=1), observed.sum(axis=0)
    if np.any(rows == 0) or np.any(cols == 0):
        raise EmptyMarginError("every row and column needs at least one observed game")

    expected = np.where(mask, 0.0, 1.0)
    change = math.inf
    for iteration in range(1, max_iters + 1):
        previous = expected.copy()
        expected *= (rows / expected.sum(axis=1))[:, None]
        expected *= (cols / expected.sum(axis=0))[None, :]
        change = float(np.max(np.abs(expected - previous)))
        if change < tol:
            logger.debug("ipf_converged", iterations=iteration, change=change)
            return expected
    residual = float(np.max(np.abs(expected.sum(axis=1) - rows)))
    raise IPFConvergenceError(
        f"IPF did not converge in {max_iters} iterations (last change {change:.3g}, row residual {residual:.3g})",
        residual=residual,
        iterations=max_iters,
    )


def independence_statistic(
    table: ContingencyTable,
    expected: np.ndarray,
    comparisons: int = settings.BONFERRONI_COMPARISONS,
    team: Optional[str] = None,
) -> TestReport:
    """
    Chi-square over unmasked cells with (r - 1)(c - 1) - #masked degrees of freedom.
    """
    observed = table.as_array()
    mask = table.mask_array()
    expected = np.asarray(expected, dtype=float)
    if expected.shape != observed.shape:
        raise DomainError("expected counts do not match the table shape")
    live = ~mask
    bad = live & (expected <= 0) & (observed > 0)
    if np.any(bad):
        r, c = (int(v) for v in np.argwhere(bad)[0])
        raise DegenerateModelError(f"cell ({r}, {c}) has observations but zero expected count")
    used = live & (expected > 0)
    statistic = float(np.sum((observed[used] - expected[used]) ** 2 / expected[used]))
    n_rows, n_cols = table.shape
    dof = (n_rows - 1) * (n_cols - 1) - int(mask.sum())
    return _chi_square_report(
        INDEPENDENCE,
        statistic,
        dof,
        comparisons,
        team=team,
        details={"excluded_games": float(table.excluded)},
    )


def independence_test(
    season: TeamSeason,
    variant: int = 12,
    comparisons: int = settings.BONFERRONI_COMPARISONS,
) -> TestReport:
    """
    Cap, tabulate, fit and score one team's quasi-independence test.

    Scores are capped at the start of the unbounded last bin so that games
    whose capped scores coincide fall on the diagonal and are set aside.
    """
    scheme = independence_bins(variant)
    cap = int(scheme.edges[-2])
    table = build_table(cap_scores(season.games, cap), scheme, drop_masked=True)
    if table.excluded:
        logger.info("diagonal_games_excluded", team=season.team, games=table.excluded, cap=cap)
    return independence_statistic(table, ipf_expected(table), comparisons, team=season.team)


def mean_z_test(
    season: TeamSeason,
    fit: FitResult,
    beta: Optional[float] = None,
    centering: ZCentering = ZCentering.WEIBULL_MEAN,
    comparisons: int = settings.BONFERRONI_COMPARISONS,
) -> Tuple[TestReport, TestReport]:
    """
    z-tests of the observed mean runs scored and allowed against the fitted model.

    z = (predicted - observed mean) / (sample sd / sqrt(games)), where the
    prediction is the Weibull mean itself (WEIBULL_MEAN) or the Weibull mean
    minus beta (TRANSLATED). Integer scores are the fitted variable rounded to
    the nearest run, so their mean tracks the untranslated Weibull mean and
    TRANSLATED is off by -beta under the model.

    Returns:
        (scored report, allowed report); statistic is the signed z
    """
    if not fit.converged:
        raise FitFailedError(f"fit for {season.team} did not converge", team=season.team)
    games = season.games_played
    if games < MIN_Z_TEST_GAMES:
        raise DomainError(f"a z-test needs at least {MIN_Z_TEST_GAMES} games, got {games}")
    beta = fit.beta if beta is None else beta
    offset = beta if centering == ZCentering.TRANSLATED else 0.0
    thresholds = _thresholds(comparisons, None)
    reports = []
    for side, scores, model_mean in (
        ("scored", season.scored(), fit.rs_model_mean),
        ("allowed", season.allowed(), fit.ra_model_mean),
    ):
        sd = float(np.std(scores, ddof=1))
        if sd == 0.0:
            raise DomainError(f"{season.team} {side} runs have zero sample variance")
        observed = float(np.mean(scores))
        predicted = model_mean - offset
        z = (predicted - observed) / (sd / math.sqrt(games))
        reports.append(
            TestReport(
                name=f"mean_{side}",
                team=season.team,
                distribution="normal",
                statistic=z,
                p_value=min(1.0, 2.0 * normal_sf(abs(z))),
                thresholds=thresholds,
                reject={key: abs(z) > value for key, value in thresholds.items()},
                details={"observed_mean": observed, "predicted_mean": predicted, "sample_sd": sd},
            )
        )
    return reports[0], reports[1]
