"""T-matrices and sufficient conditions for identifiability."""

from .search import (
    THEOREMS,
    check_auto,
    check_identifiability,
    restricted_growth_labelings,
    search_partition,
)
from .theorems import (
    check_corollary1,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    check_theorem4,
    greedy_pools,
    identity_partition,
    subset_ranks,
)
from .tmatrix import build_t_matrix, numeric_rank, pattern_count
from .verdict import (
    DISCLAIMER,
    IdentifiabilityVerdict,
    ItemPartition,
    load_partition,
    write_partition,
)

__all__ = [
    "DISCLAIMER",
    "THEOREMS",
    "IdentifiabilityVerdict",
    "ItemPartition",
    "build_t_matrix",
    "check_auto",
    "check_corollary1",
    "check_identifiability",
    "check_theorem1",
    "check_theorem2",
    "check_theorem3",
    "check_theorem4",
    "greedy_pools",
    "identity_partition",
    "load_partition",
    "numeric_rank",
    "pattern_count",
    "restricted_growth_labelings",
    "search_partition",
    "subset_ranks",
    "write_partition",
]
