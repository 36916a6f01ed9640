"""Matching estimated classes to true classes."""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import linear_sum_assignment

from errors import DomainError, PreconditionError
from models import AttributeSpace, ClassPartition, ResponseProbTable
from simulation import MixtureWeights

from .estimate import PointEstimate


@dataclass(frozen=True)
class LabelAlignment:
    """Injective map from estimated class index to true class index."""

    mapping: tuple[int, ...]
    cost: float

    def __post_init__(self):
        if len(set(self.mapping)) != len(self.mapping):
            raise DomainError(f"Label alignment is not injective: {self.mapping}")

    def __getitem__(self, estimated: int) -> int:
        return self.mapping[estimated]

    def as_dict(self) -> dict[int, int]:
        return dict(enumerate(self.mapping))

    def apply(self, partition: ClassPartition) -> ClassPartition:
        """Rename the estimated classes of `partition` to their true classes."""
        return partition.relabel(self.as_dict())

    def profiles(self, space: AttributeSpace) -> NDArray[np.int_]:
        """Attribute profile of the true class each estimated class is matched to."""
        return space.profiles()[list(self.mapping)]


def tv_cost(estimated: ResponseProbTable, truth: ResponseProbTable) -> NDArray[np.float64]:
    """cost[a, b] = sum_j TV(p-hat_{j a}, p_{j b})."""
    if estimated.spec != truth.spec:
        raise DomainError("Estimated and true tables have different response spaces")
    cost = np.zeros((estimated.n_classes, truth.n_classes))
    for p_hat, p in zip(estimated.probs, truth.probs, strict=True):
        cost += 0.5 * np.abs(p_hat[:, None, :] - p[None, :, :]).sum(axis=2)
    return cost


def align_labels(
    est: PointEstimate | ResponseProbTable,
    truth: ResponseProbTable,
    weights: MixtureWeights | None = None,
) -> LabelAlignment:
    """Minimum total-variation assignment of estimated classes to true classes.

    With `weights`, estimated classes are matched within the support of the true
    weights whenever the support is large enough.
    """
    estimated = est.table() if isinstance(est, PointEstimate) else est
    if estimated.n_classes > truth.n_classes:
        raise PreconditionError(
            f"{estimated.n_classes} estimated classes cannot be matched to {truth.n_classes} true classes"
        )
    candidates = list(range(truth.n_classes))
    if weights is not None and estimated.n_classes <= len(weights.support()):
        candidates = weights.support()
    cost = tv_cost(estimated, truth)[:, candidates]
    rows, cols = linear_sum_assignment(cost)
    mapping = [0] * estimated.n_classes
    for r, c in zip(rows, cols, strict=True):
        mapping[int(r)] = candidates[int(c)]
    return LabelAlignment(tuple(mapping), float(cost[rows, cols].sum()))
