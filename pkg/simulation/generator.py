"""Drawing datasets from a latent class model and evaluating its marginal likelihood."""

import itertools

import numpy as np
from numpy.typing import NDArray
from scipy.special import logsumexp

from config import get_config
from errors import DomainError, SizeLimitError
from logging_config import get_logger
from models import ResponseProbTable

from .dataset import Dataset
from .weights import MixtureWeights

log = get_logger(__name__)

LOG_FLOOR = 1e-300


def _check_weights(table: ResponseProbTable, weights: MixtureWeights) -> None:
    if weights.n_classes != table.n_classes:
        raise DomainError(
            f"Mixture weights cover {weights.n_classes} classes, response table has {table.n_classes}"
        )


def simulate(
    table: ResponseProbTable,
    weights: MixtureWeights,
    n: int,
    seed: int | np.random.Generator,
) -> Dataset:
    """Draw n respondents: alpha_i ~ pi, then Y_ij ~ Categorical(p_{j, alpha_i}).

    True class labels are kept on the returned dataset.
    """
    if n < 1:
        raise DomainError(f"Sample size must be at least 1, got {n}")
    _check_weights(table, weights)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    labels = rng.choice(table.n_classes, size=n, p=weights.weights)
    responses = np.empty((n, table.n_items), dtype=np.int_)
    for j, p in enumerate(table.probs):
        cumulative = np.cumsum(p[labels], axis=1)
        u = rng.random(n)
        drawn = (u[:, None] >= cumulative).sum(axis=1)
        responses[:, j] = np.minimum(drawn, p.shape[1] - 1) + 1
    log.debug("simulated", n=n, items=table.n_items, classes=table.n_classes)
    return Dataset(responses, table.spec.categories, labels)


def response_patterns(categories: tuple[int, ...]) -> NDArray[np.int_]:
    """All 0-based response patterns over items with `categories`, first item slowest."""
    return np.array(list(itertools.product(*(range(k) for k in categories))), dtype=np.int_).reshape(
        -1, len(categories)
    )


def marginal_pattern_probs(
    table: ResponseProbTable,
    weights: MixtureWeights,
    items: list[int] | None = None,
    cap: int | None = None,
) -> NDArray[np.float64]:
    """P(Y_I = y) = sum_alpha pi_alpha prod_{j in I} p_{j alpha}^{y_j}, enumerated pattern by pattern.

    Patterns are ordered as in :func:`response_patterns`. This is the brute-force oracle
    for the T-matrix product, so it walks the pattern space explicitly.
    """
    _check_weights(table, weights)
    items = list(range(table.n_items)) if items is None else list(items)
    kappa = table.spec.n_patterns(items)
    cap = cap if cap is not None else get_config().max_patterns
    if kappa > cap:
        raise SizeLimitError(f"{kappa} response patterns exceed the cap of {cap}", size=kappa, cap=cap)

    out = np.empty(kappa)
    for row, pattern in enumerate(response_patterns(tuple(table.item(j).shape[1] for j in items))):
        joint = weights.weights.copy()
        for j, y in zip(items, pattern, strict=True):
            joint *= table.item(j)[:, y]
        out[row] = joint.sum()
    return out


def class_log_likelihood(table: ResponseProbTable, dataset: Dataset) -> NDArray[np.float64]:
    """(n, M) matrix of log P(Y_i | alpha), probabilities floored before the log."""
    if dataset.categories != table.spec.categories:
        raise DomainError(
            f"Dataset categories {dataset.categories} do not match the table's {table.spec.categories}"
        )
    y = dataset.zero_based()
    out = np.zeros((dataset.n, table.n_classes))
    for j, p in enumerate(table.probs):
        out += np.log(np.maximum(p, LOG_FLOOR))[:, y[:, j]].T
    return out


def log_likelihood(table: ResponseProbTable, weights: MixtureWeights, dataset: Dataset) -> float:
    """Observed-data log-likelihood sum_i log sum_alpha pi_alpha P(Y_i | alpha)."""
    _check_weights(table, weights)
    if dataset.n == 0:
        return 0.0
    per_row = logsumexp(class_log_likelihood(table, dataset), b=weights.weights[None, :], axis=1)
    return float(per_row.sum())
