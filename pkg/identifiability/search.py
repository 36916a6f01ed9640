"""Search for an item partition satisfying the full-column-rank condition."""

import itertools
from collections.abc import Iterator

from errors import SizeLimitError, UsageError
from logging_config import get_logger
from models import AttributeSpace, QMatrix, ResponseProbTable
from simulation import MixtureWeights

from .theorems import (
    check_corollary1,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    check_theorem4,
    identity_partition,
)
from .tmatrix import build_t_matrix, numeric_rank
from .verdict import IdentifiabilityVerdict, ItemPartition

log = get_logger(__name__)

EXHAUSTIVE_ITEMS = 8
MAX_ITEMS = 24
THEOREMS = ("1", "2", "3", "4", "corollary1", "auto")


def restricted_growth_labelings(n_items: int) -> Iterator[tuple[int, ...]]:
    """Labelings of items into three nonempty subsets, one per unordered partition.

    Yields restricted growth strings (first use of label b follows first use of b - 1)
    in lexicographic order.
    """
    for labels in itertools.product(range(3), repeat=n_items):
        used = 0
        for label in labels:
            if label > used:
                break
            if label == used:
                used += 1
        else:
            if used == 3:
                yield labels


def _from_labels(labels: tuple[int, ...] | list[int]) -> ItemPartition:
    return ItemPartition(tuple(tuple(j for j, b in enumerate(labels) if b == s) for s in range(3)))


class _RankCache:
    def __init__(self, table: ResponseProbTable):
        self.table = table
        self._ranks: dict[tuple[int, ...], int] = {}

    def rank(self, subset: tuple[int, ...]) -> int:
        if subset not in self._ranks:
            try:
                self._ranks[subset] = numeric_rank(build_t_matrix(self.table, subset))
            except SizeLimitError:
                self._ranks[subset] = -1
        return self._ranks[subset]

    def score(self, partition: ItemPartition) -> tuple[int, int]:
        ranks = [self.rank(s) for s in partition.subsets]
        return min(ranks), sum(ranks)


def _local_search(cache: _RankCache, labels: list[int], target: int) -> list[int]:
    """Single-item moves and pairwise swaps, taking the first improving one, until none improves."""
    best = cache.score(_from_labels(labels))
    improved = True
    while improved and best[0] < target:
        improved = False
        candidates: list[list[int]] = []
        for j in range(len(labels)):
            for s in range(3):
                if s != labels[j]:
                    moved = list(labels)
                    moved[j] = s
                    candidates.append(moved)
        for a, b in itertools.combinations(range(len(labels)), 2):
            if labels[a] != labels[b]:
                swapped = list(labels)
                swapped[a], swapped[b] = labels[b], labels[a]
                candidates.append(swapped)
        for candidate in candidates:
            if len(set(candidate)) < 3:
                continue
            score = cache.score(_from_labels(candidate))
            if score > best:
                labels, best, improved = candidate, score, True
                break
    return labels


def search_partition(
    table: ResponseProbTable, weights: MixtureWeights
) -> tuple[ItemPartition | None, IdentifiabilityVerdict]:
    """Find I_1, I_2, I_3 whose T-matrices all have full column rank.

    Up to eight items every partition is tried in lexicographic labeling order and the
    first passing one wins. Larger item sets start from a round-robin split and improve
    it by local moves. Without a passing partition the best-rank one is returned with
    its failing verdict.
    """
    J, M = table.n_items, table.n_classes
    if J < 3:
        verdict = IdentifiabilityVerdict.from_conditions(
            "theorem3",
            {"three_subsets": False},
            {"classes": M},
            [f"{J} items cannot form three nonempty subsets"],
        )
        return None, verdict
    if J > MAX_ITEMS:
        log.warning("partition_search_large", items=J, limit=MAX_ITEMS)

    cache = _RankCache(table)
    if J <= EXHAUSTIVE_ITEMS:
        best_labels, best_score = None, (-2, -2)
        for labels in restricted_growth_labelings(J):
            score = cache.score(_from_labels(labels))
            if score > best_score:
                best_labels, best_score = labels, score
            if score[0] == M:
                break
    else:
        best_labels = _local_search(cache, [j % 3 for j in range(J)], M)

    partition = _from_labels(best_labels)
    verdict = check_theorem3(table, weights, partition) if cache.score(partition)[0] >= 0 else None
    if verdict is None:
        verdict = IdentifiabilityVerdict.from_conditions(
            "theorem3",
            {"within_size_cap": False},
            {"partition": partition.one_based()},
            ["every candidate partition has a subset above the T-matrix size cap"],
        )
    log.debug("partition_search_done", partition=partition.one_based(), passed=verdict.passed)
    return partition, verdict


def check_auto(
    table: ResponseProbTable,
    weights: MixtureWeights,
    q: QMatrix,
    space: AttributeSpace,
    support_only: bool = False,
) -> list[IdentifiabilityVerdict]:
    """Corollary 1 (binary designs), Theorem 4, then Theorem 3 over a searched partition.

    With `support_only` the partition search runs on the classes of positive weight;
    Corollary 1 and Theorem 4 always see the full attribute space, and Theorem 4 is
    skipped for tables whose classes are not the profiles of `space`.
    """
    verdicts = []
    if space.is_binary and table.is_binary:
        verdicts.append(check_corollary1(q))
    if table.n_classes == space.size:
        verdicts.append(check_theorem4(table, weights, q, space))
    if support_only:
        support = weights.support()
        table, weights = table.restrict(support), weights.restrict(support)
    _, verdict = search_partition(table, weights)
    verdicts.append(verdict)
    return verdicts


def check_identifiability(
    theorem: str,
    table: ResponseProbTable,
    weights: MixtureWeights,
    q: QMatrix,
    space: AttributeSpace,
    partition: ItemPartition | None = None,
    support_only: bool = False,
) -> list[IdentifiabilityVerdict]:
    """Run one named check (or ``auto``) and return the verdicts it produced.

    Theorems 1 and 2 fall back to the identity-row partition and Theorem 3 to a searched
    partition when none is given. `support_only` drops zero-weight classes before the
    checks that work class by class.
    """
    if theorem not in THEOREMS:
        raise UsageError(f"Unknown check '{theorem}'; expected one of {', '.join(THEOREMS)}")
    if theorem == "auto":
        return check_auto(table, weights, q, space, support_only=support_only)
    if theorem == "corollary1":
        return [check_corollary1(q)]
    if theorem == "4":
        return [check_theorem4(table, weights, q, space)]

    if support_only:
        support = weights.support()
        table, weights = table.restrict(support), weights.restrict(support)
    if theorem == "3":
        if partition is None:
            return [search_partition(table, weights)[1]]
        return [check_theorem3(table, weights, partition)]
    check = check_theorem1 if theorem == "1" else check_theorem2
    return [check(table, weights, partition or identity_partition(q))]
