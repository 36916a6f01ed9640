"""T-matrices: response-pattern by class probability matrices of item subsets."""

from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import khatri_rao

from config import get_config
from errors import DomainError, SizeLimitError
from models import ResponseProbTable


def pattern_count(table: ResponseProbTable, items: Sequence[int]) -> int:
    return table.spec.n_patterns(list(items))


def build_t_matrix(
    table: ResponseProbTable, items: Sequence[int], cap: int | None = None
) -> NDArray[np.float64]:
    """kappa x M matrix with t_{y,alpha} = prod_{j in items} p_{j alpha}^{y^j}.

    Rows follow the response patterns of `items` with the first item varying slowest,
    which is the row order of the column-wise Khatri-Rao product.
    """
    items = list(items)
    if not items:
        raise DomainError("A T-matrix needs at least one item")
    if any(not 0 <= j < table.n_items for j in items):
        raise DomainError(f"Item subset {[j + 1 for j in items]} is outside 1..{table.n_items}")
    cap = cap if cap is not None else get_config().max_patterns
    kappa = pattern_count(table, items)
    if kappa > cap:
        raise SizeLimitError(
            f"T-matrix over items {[j + 1 for j in items]} has {kappa} rows, above the cap of {cap}",
            size=kappa,
            cap=cap,
        )

    t = table.item(items[0]).T
    for j in items[1:]:
        t = khatri_rao(t, table.item(j).T)
    return np.array(t, dtype=float)


def numeric_rank(matrix: NDArray, tolerance: float | None = None) -> int:
    """Number of singular values above `tolerance` times the largest one."""
    matrix = np.asarray(matrix, dtype=float)
    if not np.all(np.isfinite(matrix)):
        raise DomainError("Cannot compute the rank of a matrix with non-finite entries")
    if matrix.size == 0:
        return 0
    tolerance = tolerance if tolerance is not None else get_config().rank_tolerance
    singular = np.linalg.svd(matrix, compute_uv=False)
    if singular[0] == 0:
        return 0
    return int(np.count_nonzero(singular > tolerance * singular[0]))
