"""
Worker pool for the Pythagorean Weibull toolkit.

Team-level fits and tests are independent, so they fan out over a process
pool. Results always come back in input order; with a single worker the
tasks run inline in the calling process.
"""
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Any, Callable, List, Optional, Sequence, Tuple, TypeVar

from src.analysis.binning import histogram
from src.analysis.estimation import fit_team
from src.analysis.inference import gof_statistic, independence_test, mean_z_test
from src.config import settings
from src.models import FitConfig, FitResult, GofDof, TeamSeason, TestReport, ZCentering
from src.utils.errors import EmptyMarginError
from src.utils.logging import get_logger


logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def run_ordered(task: Callable[[T], R], items: Sequence[T], workers: Optional[int] = None) -> List[R]:
    """
    Apply task to every item, preserving order.

    Args:
        task: Picklable callable (module-level function or functools.partial)
        items: Work items
        workers: Pool size; defaults to settings.WORKERS

    Returns:
        Results in the order of items. The first failing task's exception
        propagates.
    """
    workers = settings.WORKERS if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [task(item) for item in items]
    logger.debug("pool_started", workers=workers, tasks=len(items))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, items))


def battery_task(
    pair: Tuple[TeamSeason, FitResult],
    cfg: FitConfig,
    gof_dof: GofDof = GofDof.LITERAL,
    independence_variant: int = 12,
    centering: ZCentering = ZCentering.WEIBULL_MEAN,
    comparisons: int = settings.BONFERRONI_COMPARISONS,
) -> List[TestReport]:
    """
    Full test battery for one fitted team.

    A team whose capped score table leaves a row or column empty gets no
    independence report; the other tests still run.

    Returns:
        [goodness of fit, independence, mean scored z, mean allowed z]
    """
    season, fit = pair
    rs_hist = histogram(season.scored(), cfg.scheme)
    ra_hist = histogram(season.allowed(), cfg.scheme)
    reports = [gof_statistic(rs_hist, ra_hist, fit, interpretation=gof_dof, comparisons=comparisons)]
    try:
        reports.append(independence_test(season, independence_variant, comparisons))
    except EmptyMarginError as e:
        logger.warning("independence_skipped", team=season.team, variant=independence_variant, reason=str(e))
    reports.extend(mean_z_test(season, fit, centering=centering, comparisons=comparisons))
    return reports


def fit_all(seasons: Sequence[TeamSeason], cfg: FitConfig, workers: Optional[int] = None) -> List[FitResult]:
    return run_ordered(partial(fit_team, cfg=cfg), seasons, workers)


def run_battery(
    seasons: Sequence[TeamSeason],
    fits: Sequence[FitResult],
    cfg: FitConfig,
    workers: Optional[int] = None,
    **options: Any,
) -> List[List[TestReport]]:
    """Run battery_task for every (season, fit) pair."""
    return run_ordered(partial(battery_task, cfg=cfg, **options), list(zip(seasons, fits)), workers)

