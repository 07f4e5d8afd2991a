"""
Data models for the Pythagorean Weibull toolkit.

This module defines the pydantic models shared by every layer: distribution
parameters, bin schemes and histograms, game records and seasons, fit
configuration and results, contingency tables, test reports and the result
archive.
"""
import math
import datetime as dt
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from src.config import settings


class SchemeLabel(str, Enum):
    """Known bin layouts."""
    FIT_BINS = "fit_bins"
    INDEP_BINS = "indep_bins"
    INDEP_BINS_13 = "indep_bins_13"
    CUSTOM = "custom"


class FitMethod(str, Enum):
    """Objective minimised when fitting a team."""
    LEAST_SQUARES = "ls"
    MAX_LIKELIHOOD = "mle"


class GofDof(str, Enum):
    """How goodness-of-fit degrees of freedom are counted."""
    LITERAL = "literal"
    PUBLISHED = "published"
    ASYMPTOTIC = "asymptotic"


class ZCentering(str, Enum):
    """Which model quantity the z-test compares with the observed mean."""
    TRANSLATED = "translated"
    WEIBULL_MEAN = "weibull_mean"


class WeibullParams(BaseModel):
    """Scale alpha, translation beta and shape gamma of a three-parameter Weibull."""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    alpha: float = Field(gt=0)
    beta: float
    gamma: float = Field(gt=0)


class MatchedPair(BaseModel):
    """Scored and allowed distributions sharing beta and gamma."""
    model_config = ConfigDict(frozen=True)

    scored: WeibullParams
    allowed: WeibullParams

    @model_validator(mode="after")
    def check_shared_shape(self) -> "MatchedPair":
        if self.scored.beta != self.allowed.beta or self.scored.gamma != self.allowed.gamma:
            raise ValueError("scored and allowed must share beta and gamma")
        return self

    def swapped(self) -> "MatchedPair":
        return MatchedPair(scored=self.allowed, allowed=self.scored)


class BinScheme(BaseModel):
    """Ordered bin edges; the final edge is +inf."""
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    edges: Tuple[float, ...]
    label: SchemeLabel = SchemeLabel.CUSTOM

    @field_validator("edges")
    @classmethod
    def validate_edges(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if len(v) < 3:
            raise ValueError("a bin scheme needs at least 2 bins")
        if not math.isinf(v[-1]) or v[-1] < 0:
            raise ValueError("the last bin must be unbounded above")
        if any(not math.isfinite(e) for e in v[:-1]):
            raise ValueError("only the final edge may be infinite")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("edges must be strictly increasing")
        return v

    @property
    def n_bins(self) -> int:
        return len(self.edges) - 1

    def bounds(self, k: int) -> Tuple[float, float]:
        return self.edges[k], self.edges[k + 1]


class ScoreHistogram(BaseModel):
    """Observed count of games per bin."""
    model_config = ConfigDict(frozen=True)

    scheme: BinScheme
    counts: Tuple[int, ...]
    total: int = Field(ge=0)

    @model_validator(mode="after")
    def check_counts(self) -> "ScoreHistogram":
        if len(self.counts) != self.scheme.n_bins:
            raise ValueError(f"expected {self.scheme.n_bins} counts, got {len(self.counts)}")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")
        if sum(self.counts) != self.total:
            raise ValueError("counts must sum to total")
        return self

    def as_array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float)


class GameRecord(BaseModel):
    """One game from a team's point of view."""
    model_config = ConfigDict(frozen=True)

    date: dt.date
    team: str = Field(min_length=1)
    opponent: str = Field(min_length=1)
    runs_scored: int = Field(ge=0)
    runs_allowed: int = Field(ge=0)

    @field_validator("runs_scored", "runs_allowed")
    @classmethod
    def validate_sanity_bound(cls, v: int) -> int:
        if v > settings.SCORE_SANITY_BOUND:
            raise ValueError(f"score {v} exceeds sanity bound {settings.SCORE_SANITY_BOUND}")
        return v

    @model_validator(mode="after")
    def check_no_tie(self) -> "GameRecord":
        if self.runs_scored == self.runs_allowed:
            raise ValueError(
                f"tie {self.runs_scored}-{self.runs_allowed} on {self.date} "
                f"({self.team} vs {self.opponent}); games cannot end tied"
            )
        return self

    @property
    def won(self) -> bool:
        return self.runs_scored > self.runs_allowed


class TeamSeason(BaseModel):
    """All games of one team, ordered by date."""
    model_config = ConfigDict(frozen=True)

    team: str = Field(min_length=1)
    games: Tuple[GameRecord, ...]

    @model_validator(mode="after")
    def check_games(self) -> "TeamSeason":
        for game in self.games:
            if game.team != self.team:
                raise ValueError(f"game on {game.date} belongs to {game.team}, not {self.team}")
        return self

    @computed_field  # type: ignore[misc]
    @property
    def games_played(self) -> int:
        return len(self.games)

    @property
    def season(self) -> Optional[int]:
        return self.games[0].date.year if self.games else None

    def scored(self) -> np.ndarray:
        return np.array([g.runs_scored for g in self.games], dtype=int)

    def allowed(self) -> np.ndarray:
        return np.array([g.runs_allowed for g in self.games], dtype=int)

    @property
    def observed_wins(self) -> int:
        return sum(1 for g in self.games if g.won)


def _default_scheme() -> BinScheme:
    from src.analysis.binning import fit_bins

    return fit_bins()


class FitConfig(BaseModel):
    """Everything a team or division fit needs besides the data."""
    model_config = ConfigDict(frozen=True)

    beta: float = -0.5
    method: FitMethod = FitMethod.MAX_LIKELIHOOD
    scheme: BinScheme = Field(default_factory=_default_scheme)
    gamma_init: float = Field(default=1.82, gt=0)
    gamma_bounds: Tuple[float, float] = (0.5, 5.0)
    alpha_bounds: Tuple[float, float] = (0.1, 100.0)
    xatol: float = Field(default=1e-8, gt=0)
    fatol: float = Field(default=1e-8, gt=0)
    max_iter: int = Field(default=20000, ge=1)
    restarts: int = Field(default=5, ge=0)
    jitter: float = Field(default=0.05, ge=0)
    seed: int = 2004

    @model_validator(mode="after")
    def check_beta(self) -> "FitConfig":
        # integer scores start at 0, so the support must begin at or below the first half-bin
        if self.beta > -0.5:
            raise ValueError("beta must be at most -0.5 so that a score of 0 has positive mass")
        return self

    @classmethod
    def from_settings(cls, **overrides: Any) -> "FitConfig":
        """Build a config from the global settings, applying keyword overrides."""
        values: Dict[str, Any] = dict(
            beta=settings.DEFAULT_BETA,
            gamma_init=settings.INITIAL_GAMMA,
            gamma_bounds=settings.GAMMA_BOUNDS,
            alpha_bounds=settings.ALPHA_BOUNDS,
            xatol=settings.OPTIMIZER_XATOL,
            fatol=settings.OPTIMIZER_FATOL,
            max_iter=settings.OPTIMIZER_MAX_ITER,
            restarts=settings.OPTIMIZER_RESTARTS,
            jitter=settings.RESTART_JITTER,
            seed=settings.DEFAULT_SEED,
        )
        values.update(overrides)
        return cls(**values)

    def describe(self) -> Dict[str, Any]:
        """JSON-safe echo of the configuration for archives and reports."""
        return {
            "beta": self.beta,
            "method": self.method.value,
            "scheme": self.scheme.label.value,
            "edges": [repr(e) for e in self.scheme.edges],
            "gamma_init": self.gamma_init,
            "gamma_bounds": list(self.gamma_bounds),
            "alpha_bounds": list(self.alpha_bounds),
            "xatol": self.xatol,
            "fatol": self.fatol,
            "max_iter": self.max_iter,
            "restarts": self.restarts,
            "seed": self.seed,
        }


class FitResult(BaseModel):
    """Fitted (alpha_RS, alpha_RA, gamma) for one team with derived predictions."""
    model_config = ConfigDict(frozen=True)

    team: str
    method: FitMethod
    beta: float
    alpha_rs: float
    alpha_ra: float
    gamma: float = Field(gt=0)
    objective_value: float
    converged: bool
    message: str = ""
    iterations: int = 0
    evaluations: int = 0
    attempts: int = 1
    games_played: int = Field(ge=0)
    observed_wins: int = Field(ge=0)
    rs_model_mean: float
    ra_model_mean: float
    predicted_wlp: float = Field(gt=0, lt=1)
    predicted_wins: float

    def scored_params(self) -> WeibullParams:
        return WeibullParams(alpha=self.alpha_rs, beta=self.beta, gamma=self.gamma)

    def allowed_params(self) -> WeibullParams:
        return WeibullParams(alpha=self.alpha_ra, beta=self.beta, gamma=self.gamma)

    @property
    def predicted_losses(self) -> float:
        return self.games_played - self.predicted_wins

    @property
    def win_difference(self) -> float:
        """Observed minus predicted wins."""
        return self.observed_wins - self.predicted_wins


class DivisionFitResult(BaseModel):
    """Pooled fit: one shared gamma, an alpha pair per team."""
    model_config = ConfigDict(frozen=True)

    name: str
    method: FitMethod
    gamma: float = Field(gt=0)
    objective_value: float
    converged: bool
    teams: Tuple[FitResult, ...]


class ContingencyTable(BaseModel):
    """Scored-bin by allowed-bin game counts with a structural-zero mask."""
    model_config = ConfigDict(frozen=True)

    counts: Tuple[Tuple[int, ...], ...]
    mask: Tuple[Tuple[bool, ...], ...]
    label: SchemeLabel = SchemeLabel.CUSTOM
    excluded: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def check_shape(self) -> "ContingencyTable":
        rows = len(self.counts)
        if rows < 2 or len(self.mask) != rows:
            raise ValueError("a contingency table needs at least 2 rows and a matching mask")
        cols = len(self.counts[0])
        if cols < 2:
            raise ValueError("a contingency table needs at least 2 columns")
        for r in range(rows):
            if len(self.counts[r]) != cols or len(self.mask[r]) != cols:
                raise ValueError("ragged contingency table")
            for c in range(cols):
                if self.counts[r][c] < 0:
                    raise ValueError("counts must be nonnegative")
                if self.mask[r][c] and self.counts[r][c] != 0:
                    raise ValueError(f"structural zero at ({r}, {c}) holds {self.counts[r][c]} games")
        return self

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.counts), len(self.counts[0])

    def as_array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float)

    def mask_array(self) -> np.ndarray:
        return np.asarray(self.mask, dtype=bool)

    @property
    def total(self) -> int:
        return int(sum(sum(row) for row in self.counts))


class TestReport(BaseModel):
    """Outcome of one hypothesis test."""
    model_config = ConfigDict(frozen=True)
    __test__ = False  # not a pytest class

    name: str
    team: Optional[str] = None
    distribution: Literal["chi2", "normal"]
    statistic: float
    dof: Optional[int] = None
    p_value: float = Field(ge=0, le=1)
    thresholds: Dict[str, float]
    reject: Dict[str, bool]
    details: Dict[str, float] = Field(default_factory=dict)


class ArchiveEntry(BaseModel):
    """Fit and test reports for one (team, season, method)."""
    model_config = ConfigDict(frozen=True)

    team: str
    season: Optional[int] = None
    method: FitMethod
    fit: FitResult
    tests: Tuple[TestReport, ...] = ()
    # sha256 of the games and fit configuration behind fit; empty when unknown
    fingerprint: str = ""

    @property
    def key(self) -> Tuple[str, Optional[int], FitMethod]:
        return self.team, self.season, self.method


class ResultArchive(BaseModel):
    """Versioned collection of archive entries."""
    model_config = ConfigDict(frozen=True)

    format_version: int = settings.ARCHIVE_FORMAT_VERSION
    created_at: dt.datetime
    config: Dict[str, Any] = Field(default_factory=dict)
    entries: Tuple[ArchiveEntry, ...] = ()

    @model_validator(mode="after")
    def check_unique_keys(self) -> "ResultArchive":
        seen = set()
        for entry in self.entries:
            if entry.key in seen:
                raise ValueError(f"duplicate archive key {entry.key}")
            seen.add(entry.key)
        return self

    def get(self, team: str, method: FitMethod, season: Optional[int] = None) -> ArchiveEntry:
        for entry in self.entries:
            if entry.team == team and entry.method == method and (season is None or entry.season == season):
                return entry
        raise KeyError((team, season, method))

    def teams(self) -> List[str]:
        return sorted({entry.team for entry in self.entries})


class SimulationReport(BaseModel):
    """Monte Carlo check of the closed-form won-loss percentage."""
    model_config = ConfigDict(frozen=True)

    alpha_rs: float
    alpha_ra: float
    beta: float
    gamma: float
    games: int
    seed: int
    wins: int
    empirical_rate: float
    predicted_rate: float
    standard_error: float
    ci_low: float
    ci_high: float
    z_score: float
    within_ci: bool
