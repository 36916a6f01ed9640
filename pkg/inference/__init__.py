"""Point estimates, partial-information structure, alignment, Q-matrix and parameter recovery."""

from .alignment import LabelAlignment, align_labels, tv_cost
from .backsolve import SUPPORTED, BackSolveResult, back_solve_params, lcdm_terms, named_parameters
from .estimate import (
    PointEstimate,
    Truncation,
    oracle_estimate,
    posterior_mean,
    truncate_classes,
    truncation_threshold,
)
from .partial_info import (
    METHODS,
    cluster_partial_info,
    estimate_partial_info,
    load_partitions,
    merge_partial_info_threshold,
    partial_info_accuracy,
    partitions_document,
    write_partitions,
)
from .qmatrix import QReconstruction, load_coding, reconstruct_q, write_coding

__all__ = [
    "METHODS",
    "SUPPORTED",
    "BackSolveResult",
    "LabelAlignment",
    "PointEstimate",
    "QReconstruction",
    "Truncation",
    "align_labels",
    "back_solve_params",
    "cluster_partial_info",
    "estimate_partial_info",
    "lcdm_terms",
    "load_coding",
    "load_partitions",
    "merge_partial_info_threshold",
    "named_parameters",
    "oracle_estimate",
    "partial_info_accuracy",
    "partitions_document",
    "posterior_mean",
    "reconstruct_q",
    "truncate_classes",
    "truncation_threshold",
    "tv_cost",
    "write_coding",
    "write_partitions",
]
