"""
Season simulator for the Pythagorean Weibull toolkit.

This module draws synthetic games from matched Weibull pairs. It serves
two purposes: Monte Carlo checks of the closed-form won-loss percentage
on continuous draws, and model-true integer seasons for recovery and
calibration runs.
"""
import datetime as dt
import math
from typing import List, Mapping, Optional, Tuple

import numpy as np

from src.config import settings
from src.distributions import weibull
from src.models import GameRecord, MatchedPair, SimulationReport, TeamSeason, WeibullParams
from src.utils.errors import DomainError
from src.utils.logging import get_logger


logger = get_logger(__name__)

SEASON_START = dt.date(2004, 4, 4)
SCHEDULE_DAYS = 180
# Continuous samples are drawn in chunks to bound memory for very long runs
_CHUNK = 1_000_000


def _pair(alpha_rs: float, alpha_ra: float, beta: float, gamma: float) -> MatchedPair:
    return MatchedPair(
        scored=WeibullParams(alpha=alpha_rs, beta=beta, gamma=gamma),
        allowed=WeibullParams(alpha=alpha_ra, beta=beta, gamma=gamma),
    )


def simulate_games(
    alpha_rs: float,
    alpha_ra: float,
    gamma: float,
    beta: float = settings.DEFAULT_BETA,
    games: int = 1_000_000,
    seed: int = settings.DEFAULT_SEED,
    sigmas: float = 3.0,
) -> SimulationReport:
    """
    Compare the empirical win rate of continuous draws with the closed form.

    Args:
        alpha_rs: Scale of runs scored
        alpha_ra: Scale of runs allowed
        gamma: Shared shape
        beta: Shared translation
        games: Number of simulated games
        seed: Seed for numpy's default generator
        sigmas: Width of the reported interval in binomial standard errors

    Returns:
        Report with the empirical rate, the closed-form rate and the interval
    """
    if games < 1:
        raise DomainError("games must be at least 1")
    pair = _pair(alpha_rs, alpha_ra, beta, gamma)
    predicted = weibull.prob_exceeds(pair)
    rng = np.random.default_rng(seed)

    wins = 0
    remaining = games
    while remaining:
        n = min(remaining, _CHUNK)
        scored = weibull.sample(pair.scored, rng, n)
        allowed = weibull.sample(pair.allowed, rng, n)
        wins += int(np.count_nonzero(scored > allowed))
        remaining -= n

    empirical = wins / games
    predicted_se = math.sqrt(predicted * (1.0 - predicted) / games)
    empirical_se = math.sqrt(empirical * (1.0 - empirical) / games)
    half_width = sigmas * max(predicted_se, empirical_se)
    z = (empirical - predicted) / predicted_se if predicted_se > 0 else 0.0
    report = SimulationReport(
        alpha_rs=alpha_rs,
        alpha_ra=alpha_ra,
        beta=beta,
        gamma=gamma,
        games=games,
        seed=seed,
        wins=wins,
        empirical_rate=empirical,
        predicted_rate=predicted,
        standard_error=predicted_se,
        ci_low=empirical - half_width,
        ci_high=empirical + half_width,
        z_score=z,
        within_ci=abs(empirical - predicted) <= half_width,
    )
    logger.info("simulation_finished", games=games, empirical=empirical, predicted=predicted, z=z)
    return report


def _integer_scores(pair: MatchedPair, games: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    # Round to the nearest integer so the fit bins [k - .5, k + .5] map back to k;
    # ties and out-of-range scores are redrawn.
    scored = np.empty(games, dtype=int)
    allowed = np.empty(games, dtype=int)
    pending = np.arange(games)
    while pending.size:
        rs = np.floor(weibull.sample(pair.scored, rng, pending.size) + 0.5).astype(int)
        ra = np.floor(weibull.sample(pair.allowed, rng, pending.size) + 0.5).astype(int)
        rs = np.maximum(rs, 0)
        ra = np.maximum(ra, 0)
        ok = (rs != ra) & (rs <= settings.SCORE_SANITY_BOUND) & (ra <= settings.SCORE_SANITY_BOUND)
        scored[pending[ok]] = rs[ok]
        allowed[pending[ok]] = ra[ok]
        pending = pending[~ok]
    return scored, allowed


def synthetic_season(
    team: str,
    alpha_rs: float,
    alpha_ra: float,
    gamma: float,
    beta: float = settings.DEFAULT_BETA,
    games: int = settings.EXPECTED_SEASON_GAMES,
    rng: Optional[np.random.Generator] = None,
    start: dt.date = SEASON_START,
) -> TeamSeason:
    """
    A tie-free integer season drawn from the matched pair.

    Games are spread over a 180-day schedule starting at start, in draw order.
    """
    if games < 1:
        raise DomainError("games must be at least 1")
    rng = rng if rng is not None else np.random.default_rng(settings.DEFAULT_SEED)
    scored, allowed = _integer_scores(_pair(alpha_rs, alpha_ra, beta, gamma), games, rng)
    records = tuple(
        GameRecord(
            date=start + dt.timedelta(days=i * SCHEDULE_DAYS // games),
            team=team,
            opponent="SIM",
            runs_scored=int(rs),
            runs_allowed=int(ra),
        )
        for i, (rs, ra) in enumerate(zip(scored, allowed))
    )
    return TeamSeason(team=team, games=records)


def synthetic_league(
    alphas: Mapping[str, Tuple[float, float]],
    gamma: float,
    beta: float = settings.DEFAULT_BETA,
    games: int = settings.EXPECTED_SEASON_GAMES,
    seed: int = settings.DEFAULT_SEED,
) -> List[TeamSeason]:
    """
    One synthetic season per team from a shared generator.

    Args:
        alphas: team -> (alpha_RS, alpha_RA)
        gamma: Shared shape
        beta: Shared translation
        games: Games per team
        seed: Seed for numpy's default generator; teams are drawn in sorted order

    Returns:
        Seasons sorted by team
    """
    rng = np.random.default_rng(seed)
    return [
        synthetic_season(team, alphas[team][0], alphas[team][1], gamma, beta, games, rng)
        for team in sorted(alphas)
    ]


def export_game_log(seasons: List[TeamSeason]) -> str:
    """Render seasons in the game-log text format."""
    lines = ["date,team,opponent,runs_scored,runs_allowed"]
    for season in seasons:
        for g in season.games:
            lines.append(f"{g.date.isoformat()},{g.team},{g.opponent},{g.runs_scored},{g.runs_allowed}")
    return "\n".join(lines) + "\n"
