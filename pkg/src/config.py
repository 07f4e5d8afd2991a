"""
Configuration settings for the Pythagorean Weibull toolkit.

This module handles configuration management, environment variables,
and provides a central place for all numerical and runtime settings.
"""
from typing import Optional, Tuple

# In Pydantic 2.x, BaseSettings has moved to pydantic-settings
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import field_validator, Field


class Settings(BaseSettings):
    """
    Application settings loaded from environment variables.
    """
    # Application
    APP_NAME: str = "Pythagorean Weibull"
    APP_VERSION: str = "0.1.0"
    DEBUG: bool = Field(default=False)
    LOG_LEVEL: Optional[str] = None
    LOG_JSON: bool = True

    # Model defaults
    DEFAULT_BETA: float = -0.5
    INITIAL_GAMMA: float = 1.82
    GAMMA_BOUNDS: Tuple[float, float] = (0.5, 5.0)
    ALPHA_BOUNDS: Tuple[float, float] = (0.1, 100.0)

    # Optimizer
    OPTIMIZER_XATOL: float = 1e-8
    OPTIMIZER_FATOL: float = 1e-8
    OPTIMIZER_MAX_ITER: int = 20000
    OPTIMIZER_RESTARTS: int = 5
    RESTART_JITTER: float = 0.05

    # Inference
    IPF_TOLERANCE: float = 1e-10
    IPF_MAX_ITERS: int = 10000
    BONFERRONI_COMPARISONS: int = 14

    # Ingestion
    SCORE_SANITY_BOUND: int = 50
    ARCHIVE_FORMAT_VERSION: int = 2
    EXPECTED_SEASON_GAMES: int = 162

    # Runtime
    OUTPUT_DIR: str = "output"
    DEFAULT_SEED: int = 2004
    WORKERS: int = 1

    # Pins archive timestamps (reproducible-builds convention)
    SOURCE_DATE_EPOCH: Optional[int] = None

    @field_validator("GAMMA_BOUNDS", "ALPHA_BOUNDS")
    @classmethod
    def validate_bounds(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        """Ensure parameter bounds are positive and ordered."""
        low, high = v
        if not 0 < low < high:
            raise ValueError(f"bounds must satisfy 0 < low < high, got {v}")
        return v

    @field_validator("OPTIMIZER_XATOL", "OPTIMIZER_FATOL", "IPF_TOLERANCE")
    @classmethod
    def validate_tolerance(cls, v: float) -> float:
        """Tolerances must be strictly positive."""
        if v <= 0:
            raise ValueError("tolerance must be positive")
        return v

    @field_validator("WORKERS", "OPTIMIZER_MAX_ITER", "IPF_MAX_ITERS", "BONFERRONI_COMPARISONS")
    @classmethod
    def validate_positive_count(cls, v: int) -> int:
        if v < 1:
            raise ValueError("count must be at least 1")
        return v

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"
    )


# Create global settings object
settings = Settings()
