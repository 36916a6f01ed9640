"""Posterior-mean point estimates and class truncation."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from config import get_config
from errors import DegenerateFitError, DomainError, PreconditionError
from logging_config import get_logger
from models import ResponseProbTable
from sampler import PosteriorDraws
from simulation import MixtureWeights

log = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class PointEstimate:
    """Estimated p_{j, alpha} and pi_alpha over a set of classes.

    `exact` marks noiseless estimates built from a true table, which lets the
    partial-information estimators treat every distinct vector as its own block.
    """

    probs: tuple[NDArray[np.float64], ...]
    weights: NDArray[np.float64]
    n: int
    exact: bool = False

    def __post_init__(self):
        probs = []
        for p in self.probs:
            p = np.array(p, dtype=float, copy=True)
            p = p / p.sum(axis=1, keepdims=True)
            p.flags.writeable = False
            probs.append(p)
        weights = np.array(self.weights, dtype=float, copy=True)
        if probs and any(p.shape[0] != weights.size for p in probs):
            raise DomainError("Every item table needs one row per estimated class")
        if weights.min(initial=0.0) < 0:
            raise DomainError("Estimated class weights must be nonnegative")
        weights.flags.writeable = False
        object.__setattr__(self, "probs", tuple(probs))
        object.__setattr__(self, "weights", weights)

    @property
    def n_classes(self) -> int:
        return self.weights.size

    @property
    def n_items(self) -> int:
        return len(self.probs)

    def table(self) -> ResponseProbTable:
        return ResponseProbTable(self.probs, exact=self.exact)

    def restrict(self, retained: Sequence[int]) -> "PointEstimate":
        """Keep `retained` classes in the given order; weights are not renormalized."""
        idx = list(retained)
        return PointEstimate(tuple(p[idx] for p in self.probs), self.weights[idx], self.n, self.exact)

    def to_document(self) -> dict:
        return {
            "n": self.n,
            "pi": self.weights.tolist(),
            "probs": [p.tolist() for p in self.probs],
        }


def posterior_mean(draws: PosteriorDraws) -> PointEstimate:
    """Average the retained draws after ordering each draw's classes by decreasing pi.

    Draws are padded to the widest one with pi = 0 and uniform response distributions.
    """
    if draws.n_draws == 0:
        raise PreconditionError("Posterior mean needs at least one retained draw")
    width = int(draws.active_counts().max())
    weights = np.zeros(width)
    sums = [np.zeros((width, k)) for k in draws.categories]
    for w, probs in zip(draws.weights, draws.probs, strict=True):
        order = np.argsort(-w, kind="stable")
        weights[: w.size] += w[order]
        for j, p in enumerate(probs):
            sums[j][: w.size] += p[order]
            sums[j][w.size :] += 1.0 / p.shape[1]
    weights /= draws.n_draws
    weights /= weights.sum()
    return PointEstimate(tuple(s / draws.n_draws for s in sums), weights, draws.n_observations)


def oracle_estimate(table: ResponseProbTable, weights: MixtureWeights, n: int) -> PointEstimate:
    """Noiseless estimate equal to the true model."""
    if weights.n_classes != table.n_classes:
        raise DomainError(f"{weights.n_classes} weights for {table.n_classes} classes")
    return PointEstimate(table.probs, weights.weights, n, exact=True)


@dataclass(frozen=True)
class Truncation:
    """Retained classes (by decreasing pi) and what was discarded."""

    retained: tuple[int, ...]
    threshold: float
    discarded_mass: float
    discarded_max: float

    @property
    def n_retained(self) -> int:
        return len(self.retained)


def truncation_threshold(n: int) -> float:
    override = get_config().truncation_threshold
    if override is not None:
        return override
    if n < 1:
        raise DomainError(f"Truncation needs a positive sample size, got {n}")
    return n**-0.5


def truncate_classes(est: PointEstimate, n: int | None = None, threshold: float | None = None) -> Truncation:
    """Keep the classes with pi >= tau(n) = n^(-1/2), largest first."""
    tau = threshold if threshold is not None else truncation_threshold(n if n is not None else est.n)
    order = np.argsort(-est.weights, kind="stable")
    keep = [int(a) for a in order if est.weights[a] >= tau]
    if not keep:
        raise DegenerateFitError(
            f"No class reaches the truncation threshold {tau:.4g} (largest weight {est.weights.max():.4g})"
        )
    dropped = np.setdiff1d(np.arange(est.n_classes), keep)
    truncation = Truncation(
        retained=tuple(keep),
        threshold=tau,
        discarded_mass=float(est.weights[dropped].sum()),
        discarded_max=float(est.weights[dropped].max(initial=0.0)),
    )
    log.debug("classes_truncated", retained=truncation.n_retained, discarded_mass=truncation.discarded_mass)
    return truncation
