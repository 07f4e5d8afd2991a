"""
Estimation module for the Pythagorean Weibull toolkit.

This module fits a runs-scored and a runs-allowed Weibull sharing one shape
gamma (translation beta held fixed) to binned game scores, by least squares
or by maximum likelihood, for single teams and for pooled divisions. Fits
carry the won-loss prediction implied by the fitted means.
"""
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import OptimizeResult, minimize, minimize_scalar
from scipy.special import xlogy
from tenacity import Retrying, retry_if_result, stop_after_attempt

from src.analysis.binning import bin_centers, bin_probabilities, histogram
from src.distributions.weibull import alpha_from_mean, mean, pythagorean_ratio, won_loss_percentage
from src.models import (
    DivisionFitResult,
    FitConfig,
    FitMethod,
    FitResult,
    ScoreHistogram,
    TeamSeason,
    WeibullParams,
)
from src.utils.errors import DegenerateModelError, DomainError, FitFailedError, HistogramMismatchError
from src.utils.logging import get_logger


logger = get_logger(__name__)

# Objective value returned outside the parameter box
_PENALTY = 1.0e10

Objective = Callable[[Sequence[float], ScoreHistogram, ScoreHistogram, float], float]


class _Outcome(NamedTuple):
    x: np.ndarray
    fun: float
    converged: bool
    iterations: int
    evaluations: int
    attempts: int
    message: str


def _check_pair(rs_hist: ScoreHistogram, ra_hist: ScoreHistogram) -> None:
    if rs_hist.scheme != ra_hist.scheme:
        raise HistogramMismatchError("scored and allowed histograms use different bin schemes")
    if rs_hist.total != ra_hist.total:
        raise HistogramMismatchError(
            f"scored and allowed totals differ ({rs_hist.total} vs {ra_hist.total})"
        )


def _params(alpha: float, beta: float, gamma: float) -> WeibullParams:
    if not (alpha > 0 and gamma > 0 and np.isfinite(alpha) and np.isfinite(gamma)):
        raise DomainError(f"invalid Weibull parameters alpha={alpha}, gamma={gamma}")
    return WeibullParams(alpha=float(alpha), beta=float(beta), gamma=float(gamma))


def ls_objective(params: Sequence[float], rs_hist: ScoreHistogram, ra_hist: ScoreHistogram, beta: float) -> float:
    """
    Sum of squared differences between observed and expected bin counts.

    Args:
        params: (alpha_RS, alpha_RA, gamma)
        rs_hist: Runs-scored histogram
        ra_hist: Runs-allowed histogram
        beta: Fixed translation

    Returns:
        sum_k (RS_obs(k) - N A_RS(k))^2 + sum_k (RA_obs(k) - N A_RA(k))^2
    """
    _check_pair(rs_hist, ra_hist)
    alpha_rs, alpha_ra, gamma = params
    games = rs_hist.total
    total = 0.0
    for hist, alpha in ((rs_hist, alpha_rs), (ra_hist, alpha_ra)):
        masses = bin_probabilities(_params(alpha, beta, gamma), hist.scheme)
        total += float(np.sum((hist.as_array() - games * masses) ** 2))
    return total


def _side_nll(hist: ScoreHistogram, p: WeibullParams) -> float:
    counts = hist.as_array()
    masses = bin_probabilities(p, hist.scheme)
    empty = (counts > 0) & (masses <= 0)
    if np.any(empty):
        k = int(np.flatnonzero(empty)[0])
        raise DegenerateModelError(
            f"bin {k} holds {int(counts[k])} games but the model assigns it zero mass "
            f"(alpha={p.alpha}, gamma={p.gamma})",
            bin_index=k,
        )
    return -float(np.sum(xlogy(counts, masses)))


def ml_objective(params: Sequence[float], rs_hist: ScoreHistogram, ra_hist: ScoreHistogram, beta: float) -> float:
    """
    Negative multinomial log-likelihood of both histograms, without coefficients.

    Returns:
        -sum_k RS_obs(k) ln A_RS(k) - sum_k RA_obs(k) ln A_RA(k)
    """
    _check_pair(rs_hist, ra_hist)
    alpha_rs, alpha_ra, gamma = params
    return _side_nll(rs_hist, _params(alpha_rs, beta, gamma)) + _side_nll(ra_hist, _params(alpha_ra, beta, gamma))


def _side_gradient(hist: ScoreHistogram, p: WeibullParams) -> Tuple[float, float]:
    """d(NLL)/d(alpha) and d(NLL)/d(gamma) for one side."""
    edges = np.asarray(hist.scheme.edges, dtype=float)
    finite = np.isfinite(edges)
    t = np.zeros_like(edges)
    t[finite] = np.clip((edges[finite] - p.beta) / p.alpha, 0.0, None)
    tg = np.where(finite, np.power(t, p.gamma), np.inf)
    s = np.exp(-tg)
    safe = finite & (t > 0)
    ds_dalpha = np.zeros_like(edges)
    ds_dgamma = np.zeros_like(edges)
    ds_dalpha[safe] = s[safe] * p.gamma * tg[safe] / p.alpha
    ds_dgamma[safe] = -s[safe] * tg[safe] * np.log(t[safe])
    masses = s[:-1] - s[1:]
    counts = hist.as_array()
    used = counts > 0
    if np.any(used & (masses <= 0)):
        raise DegenerateModelError("gradient undefined: zero mass under observed counts")
    weights = np.zeros_like(counts)
    weights[used] = counts[used] / masses[used]
    d_alpha = -float(np.sum(weights * (ds_dalpha[:-1] - ds_dalpha[1:])))
    d_gamma = -float(np.sum(weights * (ds_dgamma[:-1] - ds_dgamma[1:])))
    return d_alpha, d_gamma


def ml_gradient(params: Sequence[float], rs_hist: ScoreHistogram, ra_hist: ScoreHistogram, beta: float) -> np.ndarray:
    """Analytic gradient of ml_objective with respect to (alpha_RS, alpha_RA, gamma)."""
    _check_pair(rs_hist, ra_hist)
    alpha_rs, alpha_ra, gamma = params
    da_rs, dg_rs = _side_gradient(rs_hist, _params(alpha_rs, beta, gamma))
    da_ra, dg_ra = _side_gradient(ra_hist, _params(alpha_ra, beta, gamma))
    return np.array([da_rs, da_ra, dg_rs + dg_ra])


OBJECTIVES: Dict[FitMethod, Objective] = {
    FitMethod.LEAST_SQUARES: ls_objective,
    FitMethod.MAX_LIKELIHOOD: ml_objective,
}


def _penalized(total: Callable[[np.ndarray], float], cfg: FitConfig) -> Callable[[np.ndarray], float]:
    """Wrap an objective over [alphas..., gamma] so that leaving the box costs a large penalty."""
    a_lo, a_hi = cfg.alpha_bounds
    g_lo, g_hi = cfg.gamma_bounds

    def wrapped(x: np.ndarray) -> float:
        alphas, gamma = x[:-1], x[-1]
        excess = float(
            np.sum(np.clip(a_lo - alphas, 0, None) + np.clip(alphas - a_hi, 0, None))
            + max(g_lo - gamma, 0.0)
            + max(gamma - g_hi, 0.0)
        )
        if excess > 0:
            return _PENALTY * (1.0 + excess)
        try:
            return total(x)
        except DegenerateModelError:
            return _PENALTY

    return wrapped


def _clip_to_box(x: np.ndarray, cfg: FitConfig) -> np.ndarray:
    out = np.array(x, dtype=float)
    out[:-1] = np.clip(out[:-1], *cfg.alpha_bounds)
    out[-1] = np.clip(out[-1], *cfg.gamma_bounds)
    return out


def _minimize(fun: Callable[[np.ndarray], float], x0: np.ndarray, cfg: FitConfig) -> _Outcome:
    """
    Nelder-Mead from x0, restarting from a jittered copy of the best point
    until an attempt meets both tolerances or the restart budget is spent.
    Among attempts the lowest objective wins, ties going to the lowest gamma.
    """
    rng = np.random.default_rng(cfg.seed)
    history: List[OptimizeResult] = []
    options = {
        "xatol": cfg.xatol,
        "fatol": cfg.fatol,
        "maxiter": cfg.max_iter,
        "maxfev": 2 * cfg.max_iter,
        "adaptive": len(x0) > 3,
    }

    def best() -> OptimizeResult:
        return min(history, key=lambda r: (float(r.fun), float(r.x[-1])))

    def attempt() -> OptimizeResult:
        if history:
            start = best().x * (1.0 + cfg.jitter * rng.standard_normal(len(x0)))
            start = _clip_to_box(start, cfg)
        else:
            start = x0
        result = minimize(fun, start, method="Nelder-Mead", options=options)
        history.append(result)
        return result

    retrying = Retrying(
        stop=stop_after_attempt(cfg.restarts + 1),
        retry=retry_if_result(lambda r: not r.success),
        before_sleep=lambda state: logger.info(
            "optimizer_restart", attempt=state.attempt_number, message=state.outcome.result().message
        ),
        retry_error_callback=lambda state: state.outcome.result(),
    )
    retrying(attempt)

    chosen = best()
    converged = any(r.success and float(r.fun) <= float(chosen.fun) + cfg.fatol for r in history)
    return _Outcome(
        x=np.asarray(chosen.x, dtype=float),
        fun=float(chosen.fun),
        converged=converged,
        iterations=sum(int(r.nit) for r in history),
        evaluations=sum(int(r.nfev) for r in history),
        attempts=len(history),
        message=str(chosen.message),
    )


def _histogram_mean(hist: ScoreHistogram) -> float:
    if hist.total == 0:
        raise DomainError("cannot fit an empty histogram")
    return float(np.dot(hist.as_array(), bin_centers(hist.scheme)) / hist.total)


def _initial_alpha(observed_mean: float, cfg: FitConfig) -> float:
    alpha = alpha_from_mean(max(observed_mean, cfg.beta + 1e-3), cfg.beta, cfg.gamma_init)
    return float(np.clip(alpha, *cfg.alpha_bounds))


def _build_result(
    team: str,
    cfg: FitConfig,
    alpha_rs: float,
    alpha_ra: float,
    gamma: float,
    objective_value: float,
    outcome: _Outcome,
    games: int,
    observed_wins: int,
) -> FitResult:
    rs = WeibullParams(alpha=alpha_rs, beta=cfg.beta, gamma=gamma)
    ra = WeibullParams(alpha=alpha_ra, beta=cfg.beta, gamma=gamma)
    rs_mean, ra_mean = mean(rs), mean(ra)
    wlp = won_loss_percentage(rs_mean, ra_mean, cfg.beta, gamma)
    return FitResult(
        team=team,
        method=cfg.method,
        beta=cfg.beta,
        alpha_rs=alpha_rs,
        alpha_ra=alpha_ra,
        gamma=gamma,
        objective_value=objective_value,
        converged=outcome.converged,
        message=outcome.message,
        iterations=outcome.iterations,
        evaluations=outcome.evaluations,
        attempts=outcome.attempts,
        games_played=games,
        observed_wins=observed_wins,
        rs_model_mean=rs_mean,
        ra_model_mean=ra_mean,
        predicted_wlp=wlp,
        predicted_wins=wlp * games,
    )


def fit_histograms(
    rs_hist: ScoreHistogram,
    ra_hist: ScoreHistogram,
    cfg: FitConfig,
    team: str = "",
    observed_wins: int = 0,
    rs_mean: Optional[float] = None,
    ra_mean: Optional[float] = None,
) -> FitResult:
    """
    Fit (alpha_RS, alpha_RA, gamma) to a pair of histograms.

    Args:
        rs_hist: Runs-scored histogram
        ra_hist: Runs-allowed histogram
        cfg: Fit configuration
        team: Label carried into the result
        observed_wins: Actual wins, carried into the result
        rs_mean: Sample mean of runs scored (estimated from bin centres if omitted)
        ra_mean: Sample mean of runs allowed

    Returns:
        Fit result; converged is False if no attempt met the tolerances
    """
    _check_pair(rs_hist, ra_hist)
    objective = OBJECTIVES[cfg.method]
    rs_mean = _histogram_mean(rs_hist) if rs_mean is None else rs_mean
    ra_mean = _histogram_mean(ra_hist) if ra_mean is None else ra_mean
    x0 = np.array([_initial_alpha(rs_mean, cfg), _initial_alpha(ra_mean, cfg), cfg.gamma_init])

    fun = _penalized(lambda x: objective(x, rs_hist, ra_hist, cfg.beta), cfg)
    outcome = _minimize(fun, x0, cfg)
    alpha_rs, alpha_ra, gamma = (float(v) for v in outcome.x)

    result = _build_result(
        team, cfg, alpha_rs, alpha_ra, gamma, outcome.fun, outcome, rs_hist.total, observed_wins
    )
    if result.converged:
        logger.info("team_fitted", team=team, method=cfg.method.value, gamma=gamma, attempts=outcome.attempts)
    else:
        logger.warning("fit_not_converged", team=team, method=cfg.method.value, message=outcome.message)
    return result


def fit_team(season: TeamSeason, cfg: FitConfig) -> FitResult:
    """
    Simultaneously fit Weibulls (alpha_RS, beta, gamma) and (alpha_RA, beta, gamma) to one team.

    Args:
        season: The team's games
        cfg: Fit configuration

    Returns:
        Fit result with won-loss predictions
    """
    if season.games_played == 0:
        raise DomainError(f"{season.team} has no games to fit")
    scored, allowed = season.scored(), season.allowed()
    return fit_histograms(
        histogram(scored, cfg.scheme),
        histogram(allowed, cfg.scheme),
        cfg,
        team=season.team,
        observed_wins=season.observed_wins,
        rs_mean=float(scored.mean()),
        ra_mean=float(allowed.mean()),
    )


def fit_division(seasons: Sequence[TeamSeason], cfg: FitConfig, name: str = "division") -> DivisionFitResult:
    """
    Pooled fit: an (alpha_RS, alpha_RA) pair per team and one shared gamma.

    The objective is the sum of the per-team objectives, so a five-team
    division has 11 free parameters.
    """
    if not seasons:
        raise DomainError("a division needs at least one team")
    objective = OBJECTIVES[cfg.method]
    pairs = []
    x0: List[float] = []
    for season in seasons:
        if season.games_played == 0:
            raise DomainError(f"{season.team} has no games to fit")
        scored, allowed = season.scored(), season.allowed()
        pairs.append((histogram(scored, cfg.scheme), histogram(allowed, cfg.scheme)))
        x0 += [_initial_alpha(float(scored.mean()), cfg), _initial_alpha(float(allowed.mean()), cfg)]
    x0.append(cfg.gamma_init)

    def total(x: np.ndarray) -> float:
        gamma = x[-1]
        return sum(
            objective((x[2 * i], x[2 * i + 1], gamma), rs_hist, ra_hist, cfg.beta)
            for i, (rs_hist, ra_hist) in enumerate(pairs)
        )

    outcome = _minimize(_penalized(total, cfg), np.asarray(x0), cfg)
    gamma = float(outcome.x[-1])
    teams = []
    for i, (season, (rs_hist, ra_hist)) in enumerate(zip(seasons, pairs)):
        alpha_rs, alpha_ra = float(outcome.x[2 * i]), float(outcome.x[2 * i + 1])
        teams.append(
            _build_result(
                season.team,
                cfg,
                alpha_rs,
                alpha_ra,
                gamma,
                objective((alpha_rs, alpha_ra, gamma), rs_hist, ra_hist, cfg.beta),
                outcome,
                season.games_played,
                season.observed_wins,
            )
        )
    logger.info("division_fitted", division=name, teams=len(teams), gamma=gamma, converged=outcome.converged)
    return DivisionFitResult(
        name=name,
        method=cfg.method,
        gamma=gamma,
        objective_value=outcome.fun,
        converged=outcome.converged,
        teams=tuple(teams),
    )


def predict_record(fit: FitResult, games: int) -> Tuple[float, float]:
    """
    Expected wins and losses over a number of games.

    Returns:
        (wlp * games, games - wlp * games)
    """
    if not fit.converged:
        raise FitFailedError(f"fit for {fit.team or 'team'} did not converge", team=fit.team)
    if games < 0:
        raise DomainError("games must be nonnegative")
    wins = fit.predicted_wlp * games
    return wins, games - wins


def fit_observed_exponent(seasons: Sequence[TeamSeason], bounds: Tuple[float, float] = (0.5, 5.0)) -> float:
    """
    Exponent that best fits RS_obs^g / (RS_obs^g + RA_obs^g) to observed winning percentages.

    This is the classic league-level fit the Weibull estimates are compared
    against.
    """
    data = []
    for season in seasons:
        if season.games_played == 0:
            continue
        rs_obs, ra_obs = float(season.scored().mean()), float(season.allowed().mean())
        if rs_obs <= 0 or ra_obs <= 0:
            raise DomainError(f"{season.team} has a zero run average")
        data.append((rs_obs, ra_obs, season.observed_wins / season.games_played))
    if not data:
        raise DomainError("no games to fit an exponent to")

    def sse(gamma: float) -> float:
        return sum((wlp - pythagorean_ratio(rs, ra, gamma)) ** 2 for rs, ra, wlp in data)

    result = minimize_scalar(sse, bounds=bounds, method="bounded", options={"xatol": 1e-8})
    return float(result.x)


def _describe(values: Sequence[float]) -> Dict[str, float]:
    arr = np.asarray(values, dtype=float)
    return {
        "mean": float(arr.mean()),
        "sd": float(arr.std(ddof=1)) if arr.size > 1 else 0.0,
        "median": float(np.median(arr)),
    }


def summarize_fits(fits: Sequence[FitResult]) -> Dict[str, Dict[str, float]]:
    """Mean, sample sd and median of gamma, of observed - predicted wins, and of its absolute value."""
    if not fits:
        raise DomainError("nothing to summarize")
    differences = [f.win_difference for f in fits]
    return {
        "gamma": _describe([f.gamma for f in fits]),
        "win_difference": _describe(differences),
        "abs_win_difference": _describe([abs(d) for d in differences]),
    }
