"""dcmlab configuration.

Configuration is loaded from environment variables (prefix ``DCMLAB_``) and a .env file.
Copy .env.example to .env to override the defaults.
"""

from functools import lru_cache
from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Config(BaseSettings):
    """Application configuration loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="DCMLAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Replication harness
    workers: int = Field(default=1, ge=1)
    output_dir: Path = Path("results")

    # Logging
    log_level: str = "INFO"
    json_logs: bool = False

    # Size caps
    max_classes: int = Field(default=2**20, ge=1)
    max_patterns: int = Field(default=2**20, ge=1)

    # Numerical tolerances
    rank_tolerance: float = Field(default=1e-10, gt=0)
    exact_decimals: int = Field(default=12, ge=1)
    estimated_tolerance: float = Field(default=1e-6, gt=0)

    # Partial-information estimation
    flat_epsilon: float = Field(default=0.02, ge=0)
    max_clusters: int = Field(default=8, ge=2)
    coding_search_limit: int = Field(default=8, ge=1)
    truncation_threshold: float | None = None

    @field_validator("log_level")
    @classmethod
    def normalize_level(cls, v: str) -> str:
        """Accept lower-case level names."""
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unknown log level: {v}")
        return level


@lru_cache
def get_config() -> Config:
    return Config()
