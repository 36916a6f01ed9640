"""Sufficient conditions for identifiability of a restricted latent class model.

Each check returns an :class:`IdentifiabilityVerdict` whose conditions are named after
the hypotheses they verify. A failing verdict only means that the hypothesis could not
be verified.
"""

from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from errors import DomainError, PreconditionError, SizeLimitError, UnsupportedModelError
from logging_config import get_logger
from models import AttributeSpace, QMatrix, ResponseProbTable
from simulation import MixtureWeights

from .tmatrix import build_t_matrix, numeric_rank
from .verdict import IdentifiabilityVerdict, ItemPartition

log = get_logger(__name__)


def _check_inputs(table: ResponseProbTable, weights: MixtureWeights) -> None:
    if weights.n_classes != table.n_classes:
        raise DomainError(
            f"Mixture weights cover {weights.n_classes} classes, response table has {table.n_classes}"
        )


def _require_partition(table: ResponseProbTable, partition: ItemPartition | None) -> ItemPartition:
    if partition is None:
        raise PreconditionError("This check needs an item partition (I_1, I_2, I_3)")
    partition.check_items(table.n_items)
    return partition


def _positive_weights(weights: MixtureWeights, diagnostics: list[str]) -> bool:
    zero = [int(a) + 1 for a in np.flatnonzero(weights.weights <= 0)]
    if zero:
        diagnostics.append(f"classes {zero} have zero mixture weight")
    return not zero


def _distinct_counts(table: ResponseProbTable, items: Sequence[int]) -> dict[int, int]:
    return {j: len(np.unique(table.signatures(j), axis=0)) for j in items}


def _class_keys(table: ResponseProbTable, items: Sequence[int], cumulative: bool = False) -> NDArray:
    """One row per class; equal rows mean identical distributions on every item of `items`."""
    blocks = []
    tolerance = table.distinct_tolerance()
    for j in items:
        p = table.item(j)
        if cumulative:
            p = np.cumsum(p, axis=1)[:, :-1]
        blocks.append(np.round(p / tolerance).astype(np.int64))
    return np.hstack(blocks)


def _first_collision(keys: NDArray) -> tuple[int, int] | None:
    seen: dict[bytes, int] = {}
    for a, row in enumerate(keys):
        key = row.tobytes()
        if key in seen:
            return seen[key], a
        seen[key] = a
    return None


def _two_value_condition(
    table: ResponseProbTable, partition: ItemPartition, name: str
) -> tuple[dict[str, bool], dict[str, int], list[str]]:
    counts = _distinct_counts(table, partition.items)
    diagnostics = [
        f"item {j + 1} takes {count} distinct response distributions (at most 2 allowed)"
        for j, count in counts.items()
        if count > 2
    ]
    return {name: not diagnostics}, {str(j + 1): c for j, c in counts.items()}, diagnostics


def _distinct_columns(
    table: ResponseProbTable, partition: ItemPartition, cumulative: bool
) -> tuple[bool, list[str]]:
    diagnostics = []
    for i, subset in enumerate(partition.subsets):
        collision = _first_collision(_class_keys(table, subset, cumulative))
        if collision is not None:
            a, b = collision
            diagnostics.append(
                f"classes {a + 1} and {b + 1} are indistinguishable on I_{i + 1} = {[j + 1 for j in subset]}"
            )
    return not diagnostics, diagnostics


def check_theorem1(
    table: ResponseProbTable, weights: MixtureWeights, partition: ItemPartition | None
) -> IdentifiabilityVerdict:
    """Two-valued binary items, class-distinct subsets and positive weights."""
    _check_inputs(table, weights)
    partition = _require_partition(table, partition)
    if not table.is_binary:
        raise UnsupportedModelError("Theorem 1 applies to binary responses; use Theorem 2")

    conditions, counts, diagnostics = _two_value_condition(table, partition, "A2")
    a1, a1_diagnostics = _distinct_columns(table, partition, cumulative=False)
    diagnostics += a1_diagnostics
    a3 = _positive_weights(weights, diagnostics)
    return IdentifiabilityVerdict.from_conditions(
        "theorem1",
        {"A1": a1, **conditions, "A3": a3},
        {"partition": partition.one_based(), "distinct_values": counts},
        diagnostics,
    )


def check_theorem2(
    table: ResponseProbTable, weights: MixtureWeights, partition: ItemPartition | None
) -> IdentifiabilityVerdict:
    """Multi-category analogue: two-valued items, distinct partial sums, positive weights."""
    _check_inputs(table, weights)
    partition = _require_partition(table, partition)

    conditions, counts, diagnostics = _two_value_condition(table, partition, "B1")
    b2, b2_diagnostics = _distinct_columns(table, partition, cumulative=True)
    diagnostics += b2_diagnostics
    b3 = _positive_weights(weights, diagnostics)
    return IdentifiabilityVerdict.from_conditions(
        "theorem2",
        {**conditions, "B2": b2, "B3": b3},
        {"partition": partition.one_based(), "distinct_values": counts},
        diagnostics,
    )


def subset_ranks(
    table: ResponseProbTable, partition: ItemPartition, cap: int | None = None
) -> list[int]:
    return [numeric_rank(build_t_matrix(table, subset, cap)) for subset in partition.subsets]


def check_theorem3(
    table: ResponseProbTable,
    weights: MixtureWeights,
    partition: ItemPartition | None,
    cap: int | None = None,
) -> IdentifiabilityVerdict:
    """Full column rank of the T-matrix of each subset, and positive weights."""
    _check_inputs(table, weights)
    partition = _require_partition(table, partition)
    try:
        ranks = subset_ranks(table, partition, cap)
    except SizeLimitError as e:
        raise SizeLimitError(f"{e}; use the Theorem 4 check instead", size=e.size, cap=e.cap) from e

    diagnostics = [
        f"T-matrix of I_{i + 1} has rank {rank} < {table.n_classes}"
        for i, rank in enumerate(ranks)
        if rank < table.n_classes
    ]
    conditions = {f"rank_I{i + 1}": rank == table.n_classes for i, rank in enumerate(ranks)}
    conditions["positive_weights"] = _positive_weights(weights, diagnostics)
    return IdentifiabilityVerdict.from_conditions(
        "theorem3",
        conditions,
        {"partition": partition.one_based(), "ranks": ranks, "classes": table.n_classes},
        diagnostics,
    )


def identity_partition(q: QMatrix) -> ItemPartition:
    """Three disjoint sets of items, each containing one e_k row for every attribute k."""
    units = [q.unit_rows(k) for k in range(q.n_attributes)]
    short = [k + 1 for k, rows in enumerate(units) if len(rows) < 3]
    if short:
        raise PreconditionError(f"Attributes {short} have fewer than three single-attribute items")
    return ItemPartition(tuple(tuple(rows[i] for rows in units) for i in range(3)))


def check_corollary1(q: QMatrix) -> IdentifiabilityVerdict:
    """Q contains three disjoint identity submatrices."""
    units = [q.unit_rows(k) for k in range(q.n_attributes)]
    conditions = {f"identity_rows_attribute_{k + 1}": len(rows) >= 3 for k, rows in enumerate(units)}
    diagnostics = [
        f"attribute {k + 1} has only {len(rows)} items with q-row e_{k + 1} (needs 3)"
        for k, rows in enumerate(units)
        if len(rows) < 3
    ]
    certificate: dict = {"unit_rows": {str(k + 1): [j + 1 for j in rows] for k, rows in enumerate(units)}}
    if not diagnostics:
        certificate["partition"] = identity_partition(q).one_based()
    return IdentifiabilityVerdict.from_conditions("corollary1", conditions, certificate, diagnostics)


def _level_representatives(space: AttributeSpace, k: int) -> list[int]:
    """One class per level of attribute k, all other attributes at level 0."""
    reps = []
    for level in range(space.levels[k]):
        profile = [0] * space.n_attributes
        profile[k] = level
        reps.append(space.index_of(tuple(profile)))
    return reps


def greedy_pools(
    reduced: ResponseProbTable, candidates: Sequence[int], levels: int, cap: int | None = None
) -> list[list[int]]:
    """Group `candidates` in order into pools whose reduced T-matrix has rank `levels`."""
    pools: list[list[int]] = []
    current: list[int] = []
    for j in candidates:
        current.append(j)
        try:
            rank = numeric_rank(build_t_matrix(reduced, current, cap))
        except SizeLimitError:
            break
        if rank == levels:
            pools.append(current)
            current = []
            if len(pools) == 3:
                break
    return pools


def check_theorem4(
    table: ResponseProbTable,
    weights: MixtureWeights,
    q: QMatrix,
    space: AttributeSpace,
    cap: int | None = None,
) -> IdentifiabilityVerdict:
    """Per-attribute pools of single-attribute items with full-rank reduced T-matrices."""
    _check_inputs(table, weights)
    if table.n_classes != space.size:
        raise DomainError(f"Response table has {table.n_classes} classes, attribute space has {space.size}")
    if q.n_items != table.n_items or q.n_attributes != space.n_attributes:
        raise DomainError(
            f"Q-matrix is {q.n_items}x{q.n_attributes}, expected {table.n_items}x{space.n_attributes}"
        )

    conditions: dict[str, bool] = {}
    pools_by_attribute: dict[str, list[list[int]]] = {}
    diagnostics: list[str] = []
    for k in range(space.n_attributes):
        candidates = q.unit_rows(k)
        reduced = table.restrict(_level_representatives(space, k))
        pools = greedy_pools(reduced, candidates, space.levels[k], cap)
        pools_by_attribute[str(k + 1)] = [[j + 1 for j in pool] for pool in pools]
        conditions[f"pools_attribute_{k + 1}"] = len(pools) == 3
        if len(pools) < 3:
            diagnostics.append(
                f"attribute {k + 1}: only {len(pools)} of 3 rank-{space.levels[k]} pools "
                f"from single-attribute items {[j + 1 for j in candidates]}"
            )
    conditions["positive_weights"] = _positive_weights(weights, diagnostics)
    log.debug("theorem4_checked", pools=pools_by_attribute)
    return IdentifiabilityVerdict.from_conditions(
        "theorem4", conditions, {"pools": pools_by_attribute}, diagnostics
    )

