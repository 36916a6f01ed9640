"""Estimating each item's partition of the latent classes."""

import json
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ValidationError
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import pdist, squareform
from sklearn.cluster import KMeans
from sklearn.metrics import silhouette_score

from config import get_config
from errors import ConfigError, UsageError
from logging_config import get_logger
from models import ClassPartition

from .alignment import LabelAlignment
from .estimate import PointEstimate

log = get_logger(__name__)

METHODS = ("cluster", "threshold")
EXACT_FIT = 1e-12


def _kmeans(vectors: np.ndarray, k: int) -> KMeans:
    return KMeans(n_clusters=k, n_init=10, random_state=0).fit(vectors)


def cluster_partial_info(
    est: PointEstimate,
    j: int,
    epsilon: float | None = None,
    max_clusters: int | None = None,
) -> ClassPartition:
    """K-means on the vectors p-hat_{j alpha}, with k chosen by average silhouette width.

    Items whose vectors all lie within `epsilon` of each other form a single block. A
    k below the class count that reproduces the vectors exactly (zero inertia) is taken
    as is; otherwise k ranges over 2..min(M - 1, max_clusters).
    """
    config = get_config()
    epsilon = config.flat_epsilon if epsilon is None else epsilon
    max_clusters = config.max_clusters if max_clusters is None else max_clusters
    vectors = est.probs[j]
    M = vectors.shape[0]
    classes = range(M)
    if M < 2 or pdist(vectors).max() < epsilon:
        return ClassPartition.single_block(classes)
    if M == 2:
        return ClassPartition.from_labels([0, 1])

    distinct = np.unique(vectors, axis=0).shape[0]
    upper = min(M - 1, max_clusters, distinct)
    for k in range(2, upper + 1):
        fit = _kmeans(vectors, k)
        if fit.inertia_ <= EXACT_FIT:
            return ClassPartition.from_labels(fit.labels_)
    if est.exact or distinct < 3:
        # no coarser exact grouping exists: every distinct vector is its own block
        return ClassPartition.from_labels([tuple(v) for v in vectors])

    best_labels, best_score = None, -np.inf
    for k in range(2, upper + 1):
        labels = _kmeans(vectors, k).labels_
        score = silhouette_score(vectors, labels)
        if score > best_score:
            best_labels, best_score = labels, score
    return ClassPartition.from_labels(best_labels)


def merge_partial_info_threshold(
    est: PointEstimate, j: int, n: int | None = None, threshold: float | None = None
) -> ClassPartition:
    """Link classes with sum_y (p-hat_a - p-hat_b)^2 <= n^(-1/2); blocks are connected components."""
    tau = threshold if threshold is not None else (n if n is not None else est.n) ** -0.5
    vectors = est.probs[j]
    if vectors.shape[0] < 2:
        return ClassPartition.single_block(range(vectors.shape[0]))
    linked = squareform(pdist(vectors, "sqeuclidean")) <= tau
    _, labels = connected_components(csr_matrix(linked), directed=False)
    return ClassPartition.from_labels(labels)


def estimate_partial_info(
    est: PointEstimate, method: str = "cluster", n: int | None = None
) -> list[ClassPartition]:
    """One partition of the estimate's classes per item."""
    if method == "cluster":
        return [cluster_partial_info(est, j) for j in range(est.n_items)]
    if method == "threshold":
        return [merge_partial_info_threshold(est, j, n) for j in range(est.n_items)]
    raise UsageError(f"Unknown partial-information method '{method}'; expected one of {', '.join(METHODS)}")


def partial_info_accuracy(
    estimated: Sequence[ClassPartition],
    true: Sequence[ClassPartition],
    alignment: LabelAlignment,
) -> float:
    """Fraction of items whose aligned estimated partition equals the true one on the matched classes."""
    if len(estimated) != len(true):
        raise UsageError(f"{len(estimated)} estimated partitions for {len(true)} items")
    if not estimated:
        return 0.0
    matched = set(alignment.mapping)
    hits = sum(
        alignment.apply(e) == t.restrict(matched) for e, t in zip(estimated, true, strict=True)
    )
    return hits / len(estimated)


class _PartitionsDocument(BaseModel):
    partitions: list[list[list[int]]]


def load_partitions(path: str | Path) -> list[ClassPartition]:
    """Read ``{"partitions": [[[1, 2], [3]], ...]}``: per item, blocks of 1-based classes.

    Extra keys are ignored, so a ``cluster`` report can be read directly.
    """
    try:
        document = _PartitionsDocument.model_validate_json(Path(path).read_text())
    except (OSError, ValidationError) as e:
        raise ConfigError(f"Cannot read item partitions {path}: {e}") from e
    return [
        ClassPartition(tuple(tuple(c - 1 for c in block) for block in item))
        for item in document.partitions
    ]


def partitions_document(partitions: Sequence[ClassPartition]) -> list[list[list[int]]]:
    return [[[c + 1 for c in block] for block in p.blocks] for p in partitions]


def write_partitions(partitions: Sequence[ClassPartition], path: str | Path) -> None:
    Path(path).write_text(json.dumps({"partitions": partitions_document(partitions)}) + "\n")
