"""Sampler settings."""

from pathlib import Path

from pydantic import BaseModel, Field, ValidationError, model_validator

from errors import ConfigError


class SamplerConfig(BaseModel):
    """Chain length, thinning, seed and stick-breaking options.

    `iterations` counts every sweep including burn-in; draws are retained at sweeps
    burn_in, burn_in + thin, ... below `iterations`.
    """

    iterations: int = Field(default=6000, ge=1)
    burn_in: int = Field(default=2000, ge=0)
    thin: int = Field(default=2, ge=1)
    seed: int = 0
    max_sticks: int = Field(default=512, ge=1)
    hyperprior: bool = True
    beta: float = Field(default=1.0, gt=0)
    progress_every: int = Field(default=100, ge=1)
    check_invariants: bool = False

    @model_validator(mode="after")
    def _retains_draws(self) -> "SamplerConfig":
        if self.iterations <= self.burn_in:
            raise ValueError(
                f"iterations ({self.iterations}) must exceed burn_in ({self.burn_in}) to retain any draw"
            )
        return self

    @property
    def retained(self) -> int:
        return len(range(self.burn_in, self.iterations, self.thin))


def load_sampler_config(path: str | Path) -> SamplerConfig:
    try:
        return SamplerConfig.model_validate_json(Path(path).read_text())
    except (OSError, ValidationError) as e:
        raise ConfigError(f"Cannot read sampler config {path}: {e}") from e
