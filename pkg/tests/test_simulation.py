"""
Tests for the season simulator and the worker pool.
"""
import datetime as dt
import math
import pickle

import numpy as np
import pytest

from src.analysis.estimation import fit_team
from src.analysis.inference import independence_test
from src.generators.season_simulator import simulate_games, synthetic_league, synthetic_season
from src.models import GameRecord, TeamSeason
from src.utils.errors import (
    DegenerateModelError,
    DomainError,
    EmptyMarginError,
    FitFailedError,
    IPFConvergenceError,
    StructuralZeroError,
)
from src.worker import battery_task, fit_all, run_battery, run_ordered


class TestSimulateGames:
    @pytest.mark.slow
    def test_million_games_within_three_sigma(self):
        report = simulate_games(3.0, 2.0, 1.8, beta=-0.5, games=1_000_000, seed=2004)
        assert report.predicted_rate == pytest.approx(3.0 ** 1.8 / (3.0 ** 1.8 + 2.0 ** 1.8))
        assert report.within_ci
        assert abs(report.z_score) <= 3.0
        assert report.ci_low < report.empirical_rate < report.ci_high

    def test_report_fields(self):
        report = simulate_games(5.0, 4.5, 1.8, games=10_000, seed=1)
        assert report.games == 10_000
        assert report.empirical_rate == report.wins / 10_000
        assert report.standard_error == pytest.approx(
            np.sqrt(report.predicted_rate * (1 - report.predicted_rate) / 10_000)
        )

    def test_seeded(self):
        assert simulate_games(5.0, 4.5, 1.8, games=5000, seed=9) == simulate_games(5.0, 4.5, 1.8, games=5000, seed=9)

    def test_rejects_no_games(self):
        with pytest.raises(DomainError):
            simulate_games(5.0, 4.5, 1.8, games=0)


class TestSyntheticSeasons:
    def test_no_ties_and_integer_scores(self, synthetic_team):
        assert synthetic_team.games_played == 162
        assert all(g.runs_scored != g.runs_allowed for g in synthetic_team.games)
        assert all(g.runs_scored >= 0 and g.runs_allowed >= 0 for g in synthetic_team.games)

    def test_deterministic(self):
        a = synthetic_season("X", 5.0, 4.0, 1.8, rng=np.random.default_rng(3))
        b = synthetic_season("X", 5.0, 4.0, 1.8, rng=np.random.default_rng(3))
        assert a == b

    def test_long_season_stays_in_one_year(self):
        season = synthetic_season("X", 5.0, 4.0, 1.8, games=5000, rng=np.random.default_rng(3))
        assert {g.date.year for g in season.games} == {2004}
        dates = [g.date for g in season.games]
        assert dates == sorted(dates)

    def test_league_sorted_by_team(self):
        league = synthetic_league({"ZED": (5.0, 5.0), "ACE": (5.0, 5.0)}, gamma=1.8, games=30, seed=4)
        assert [s.team for s in league] == ["ACE", "ZED"]

    def test_scores_track_scale(self):
        season = synthetic_season("X", 6.5, 3.5, 1.8, games=2000, rng=np.random.default_rng(5))
        assert season.scored().mean() > season.allowed().mean() + 2.0
        assert season.observed_wins > 1400


class TestWorkerPool:
    def test_run_ordered_inline(self):
        assert run_ordered(abs, [-3, 1, -2], workers=1) == [3, 1, 2]
        assert run_ordered(abs, [], workers=4) == []

    def test_pool_matches_inline(self, synthetic_seasons, fit_config):
        inline = fit_all(synthetic_seasons, fit_config, workers=1)
        pooled = fit_all(synthetic_seasons, fit_config, workers=2)
        assert pooled == inline
        assert [f.team for f in pooled] == ["AAA", "BBB", "CCC"]

    def test_battery_order(self, fit_config):
        league = synthetic_league({"AAA": (5.6, 4.9), "BBB": (5.0, 5.3)}, gamma=1.8, games=1500, seed=6)
        fits = [fit_team(s, fit_config) for s in league]
        batteries = run_battery(league, fits, fit_config, workers=2)
        assert [[r.team for r in reports] for reports in batteries] == [["AAA"] * 4, ["BBB"] * 4]
        assert [r.name for r in batteries[0]] == ["goodness_of_fit", "independence", "mean_scored", "mean_allowed"]

    def test_pool_propagates_errors(self):
        with pytest.raises(ValueError):
            run_ordered(math.sqrt, [4.0, -1.0, 9.0], workers=2)


@pytest.mark.parametrize(
    "error",
    [
        DegenerateModelError("zero mass", bin_index=11),
        FitFailedError("no convergence", team="BOS"),
        StructuralZeroError("diagonal", row=3, col=3),
        IPFConvergenceError("budget", residual=1e-3, iterations=10),
    ],
)
def test_errors_survive_pickling(error):
    copy = pickle.loads(pickle.dumps(error))
    assert type(copy) is type(error)
    assert str(copy) == str(error)
    assert vars(copy) == vars(error)


def test_battery_skips_independence_on_empty_margin(synthetic_team, fit_config):
    # no score above 5, so rows and columns 6..11 of the table stay empty
    pattern = [(1, 0), (0, 2), (3, 1), (2, 4), (5, 3), (4, 1), (0, 5), (2, 3)]
    start = dt.date(2004, 4, 5)
    low = TeamSeason(
        team="LOW",
        games=tuple(
            GameRecord(date=start + dt.timedelta(days=i), team="LOW", opponent="OPP", runs_scored=rs, runs_allowed=ra)
            for i, (rs, ra) in enumerate(pattern * 5)
        ),
    )
    fit = fit_team(synthetic_team, fit_config).model_copy(update={"team": "LOW"})
    with pytest.raises(EmptyMarginError):
        independence_test(low)
    reports = battery_task((low, fit), fit_config)
    assert [r.name for r in reports] == ["goodness_of_fit", "mean_scored", "mean_allowed"]
    assert {r.team for r in reports} == {"LOW"}
