"""Response probability tables p_{j,alpha}^y and their partial-information structure."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from config import get_config
from errors import DomainError, UnsupportedModelError

from .base import ItemResponseModel
from .families import Saturated
from .partition import ClassPartition
from .space import AttributeSpace, QMatrix, ResponseSpec

SUM_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class ResponseProbTable:
    """Per-item, per-class categorical response distributions.

    `probs[j]` is an (M, k_j) array whose rows sum to one. `exact` marks tables
    computed from a model (as opposed to estimated ones); it selects the tolerance
    used when counting distinct response vectors.
    """

    probs: tuple[NDArray[np.float64], ...]
    exact: bool = True

    def __post_init__(self):
        if not self.probs:
            raise DomainError("Response table needs at least one item")
        frozen = []
        n_classes = None
        for j, p in enumerate(self.probs):
            p = np.array(p, dtype=float, copy=True)
            if p.ndim != 2 or p.shape[1] < 2:
                raise DomainError(f"Item {j + 1}: expected an (M, k_j >= 2) array, got shape {p.shape}")
            if n_classes is None:
                n_classes = p.shape[0]
            elif p.shape[0] != n_classes:
                raise DomainError(f"Item {j + 1} has {p.shape[0]} classes, expected {n_classes}")
            if not np.all(np.isfinite(p)) or p.min() < 0 or p.max() > 1:
                raise DomainError(f"Item {j + 1}: probabilities must lie in [0, 1]")
            if np.abs(p.sum(axis=1) - 1.0).max(initial=0.0) > SUM_TOLERANCE:
                raise DomainError(f"Item {j + 1}: response distributions do not sum to 1")
            p.flags.writeable = False
            frozen.append(p)
        object.__setattr__(self, "probs", tuple(frozen))

    @classmethod
    def from_success(cls, success: NDArray[np.float64], exact: bool = True) -> "ResponseProbTable":
        """Binary table from a (J, M) matrix of p_{j,alpha} = P(Y^j = 2 | alpha)."""
        success = np.asarray(success, dtype=float)
        return cls(tuple(np.column_stack([1.0 - row, row]) for row in success), exact=exact)

    @property
    def n_items(self) -> int:
        return len(self.probs)

    @property
    def n_classes(self) -> int:
        return self.probs[0].shape[0]

    @property
    def spec(self) -> ResponseSpec:
        return ResponseSpec(tuple(p.shape[1] for p in self.probs))

    @property
    def is_binary(self) -> bool:
        return all(p.shape[1] == 2 for p in self.probs)

    def item(self, j: int) -> NDArray[np.float64]:
        return self.probs[j]

    def success(self) -> NDArray[np.float64]:
        """(J, M) matrix of P(Y^j = 2 | alpha) for binary tables."""
        if not self.is_binary:
            raise UnsupportedModelError("success() is only defined for binary response tables")
        return np.vstack([p[:, 1] for p in self.probs])

    def restrict(self, classes: Sequence[int]) -> "ResponseProbTable":
        """Sub-table over `classes`, in the given order."""
        idx = list(classes)
        return ResponseProbTable(tuple(p[idx] for p in self.probs), exact=self.exact)

    def permute(self, order: Sequence[int]) -> "ResponseProbTable":
        return self.restrict(order)

    def distinct_tolerance(self) -> float:
        config = get_config()
        return 10.0 ** (-config.exact_decimals) if self.exact else config.estimated_tolerance

    def signatures(self, j: int) -> NDArray[np.int64]:
        """Integer keys per class; equal keys mean equal distributions at the table's tolerance."""
        return np.round(self.probs[j] / self.distinct_tolerance()).astype(np.int64)

    def to_list(self) -> list[list[list[float]]]:
        return [p.tolist() for p in self.probs]


def build_prob_table(
    model: ItemResponseModel, q: QMatrix, space: AttributeSpace, spec: ResponseSpec
) -> ResponseProbTable:
    """Materialize p_{j,alpha}^y for every item and every class of `space`."""
    space.check_size()
    if q.n_attributes != space.n_attributes:
        raise DomainError(f"Q-matrix has {q.n_attributes} attributes, space has {space.n_attributes}")
    if q.n_items != spec.n_items:
        raise DomainError(f"Q-matrix has {q.n_items} items, response spec has {spec.n_items}")
    return ResponseProbTable(model.category_probs(q, space, spec), exact=True)


def true_partial_info(table: ResponseProbTable, j: int) -> ClassPartition:
    """Group classes whose distributions on item j are exactly equal."""
    keys = [tuple(row) for row in table.item(j).tolist()]
    return ClassPartition.from_labels(keys)


def table_for(
    model: ItemResponseModel, q: QMatrix, space: AttributeSpace | None = None
) -> ResponseProbTable:
    """Response table of `model` over binary attributes; saturated models keep their categories."""
    space = space or AttributeSpace.binary(q.n_attributes)
    if isinstance(model, Saturated):
        spec = ResponseSpec(tuple(p.shape[-1] for p in model.probs))
    else:
        spec = ResponseSpec.binary(q.n_items)
    return build_prob_table(model, q, space, spec)
