"""
Pytest configuration for the Pythagorean Weibull toolkit.

This module provides fixtures and configuration for testing.
"""
import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add source directory to path to allow imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.config import settings
from src.generators.season_simulator import export_game_log, synthetic_league, synthetic_season
from src.models import FitConfig, FitMethod, MatchedPair, WeibullParams

# Optional 2004 American League game log for the reproduction tests
AL2004_ENV = "PYTHAGOREAN_AL2004_LOG"


@pytest.fixture
def rng():
    """
    Seeded numpy generator.

    Returns:
        np.random.Generator: Generator seeded with the default seed
    """
    return np.random.default_rng(settings.DEFAULT_SEED)


@pytest.fixture
def canonical_params():
    """Runs-scored Weibull with typical major-league values."""
    return WeibullParams(alpha=5.0, beta=-0.5, gamma=1.8)


@pytest.fixture
def canonical_pair():
    """Scored/allowed pair sharing beta and gamma."""
    return MatchedPair(
        scored=WeibullParams(alpha=5.5, beta=-0.5, gamma=1.8),
        allowed=WeibullParams(alpha=5.0, beta=-0.5, gamma=1.8),
    )


@pytest.fixture
def synthetic_team():
    """A 162-game model-true season."""
    return synthetic_season("SYN", 5.5, 5.0, 1.8, rng=np.random.default_rng(7))


@pytest.fixture
def synthetic_seasons():
    """Three 162-game model-true seasons."""
    return synthetic_league({"AAA": (5.6, 4.9), "BBB": (5.2, 5.2), "CCC": (4.8, 5.5)}, gamma=1.8, seed=11)


@pytest.fixture
def fit_config():
    """
    Fit configuration with the default settings and maximum likelihood.

    Returns:
        FitConfig: Config for MLE fits
    """
    return FitConfig.from_settings(method=FitMethod.MAX_LIKELIHOOD)


@pytest.fixture
def game_log_file(tmp_path, synthetic_seasons):
    """
    Write the synthetic seasons as a game-log file.

    Returns:
        Path: Location of the game log
    """
    path = tmp_path / "games.csv"
    path.write_text(export_game_log(synthetic_seasons), encoding="utf-8")
    return path


@pytest.fixture
def al2004_log():
    """
    Path to the user-supplied 2004 AL game log; skips when absent.

    Returns:
        Path: Location of the game log
    """
    value = os.environ.get(AL2004_ENV)
    if not value or not Path(value).is_file():
        pytest.skip(f"set {AL2004_ENV} to a 2004 AL game log to run reproduction tests")
    return Path(value)
