"""Latent class proportions pi_alpha."""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ValidationError

from errors import ConfigError, DomainError

# Documents written by hand (1/6, 1/3, ...) are accepted within this tolerance and renormalized.
LOAD_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class MixtureWeights:
    """Nonnegative class weights summing to one; zero weights are allowed."""

    weights: NDArray[np.float64]

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, copy=True)
        if w.ndim != 1 or w.size == 0:
            raise DomainError(f"Mixture weights must be a non-empty vector, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or w.min() < 0:
            raise DomainError("Mixture weights must be finite and nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise DomainError(f"Mixture weights sum to {w.sum()!r}, not 1")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @classmethod
    def normalized(cls, weights: NDArray | list[float], tolerance: float = LOAD_TOLERANCE) -> "MixtureWeights":
        """Rescale weights that sum to 1 within `tolerance`."""
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or not np.all(np.isfinite(w)) or (w.size and w.min() < 0):
            raise DomainError("Mixture weights must be a finite nonnegative vector")
        if abs(w.sum() - 1.0) > tolerance:
            raise DomainError(f"Mixture weights sum to {w.sum()!r}, not 1")
        return cls(w / w.sum())

    @classmethod
    def uniform(cls, n_classes: int) -> "MixtureWeights":
        return cls(np.full(n_classes, 1.0 / n_classes))

    @property
    def n_classes(self) -> int:
        return self.weights.size

    def support(self) -> list[int]:
        """Classes with positive weight."""
        return [int(a) for a in np.flatnonzero(self.weights > 0)]

    def restrict(self, classes: list[int]) -> "MixtureWeights":
        return MixtureWeights.normalized(self.weights[list(classes)] / self.weights[list(classes)].sum())

    def __getitem__(self, index: int) -> float:
        return float(self.weights[index])

    def to_list(self) -> list[float]:
        return self.weights.tolist()


class WeightsDocument(BaseModel):
    pi: list[float]


def load_weights(path: str | Path) -> MixtureWeights:
    """Read ``{"pi": [...]}``."""
    try:
        document = WeightsDocument.model_validate_json(Path(path).read_text())
    except (OSError, ValidationError) as e:
        raise ConfigError(f"Cannot read mixture weights {path}: {e}") from e
    return MixtureWeights.normalized(document.pi)


def write_weights(weights: MixtureWeights, path: str | Path) -> None:
    Path(path).write_text(json.dumps({"pi": weights.to_list()}, indent=2) + "\n")
