"""Q-matrices, attribute spaces and the DCM parameterizations."""

from .base import ItemResponseModel, ideal_response_dina, ideal_response_dino
from .families import CRUM, DINA, DINO, FAMILIES, LCDM, NIDA, ReducedNCRUM, Saturated
from .io import dump_model, load_model, load_q_matrix, parse_model, write_q_matrix
from .partition import ClassPartition
from .space import AttributeSpace, QMatrix, ResponseSpec
from .table import ResponseProbTable, build_prob_table, table_for, true_partial_info

__all__ = [
    "CRUM",
    "DINA",
    "DINO",
    "FAMILIES",
    "LCDM",
    "NIDA",
    "AttributeSpace",
    "ClassPartition",
    "ItemResponseModel",
    "QMatrix",
    "ReducedNCRUM",
    "ResponseProbTable",
    "ResponseSpec",
    "Saturated",
    "build_prob_table",
    "dump_model",
    "ideal_response_dina",
    "ideal_response_dino",
    "load_model",
    "load_q_matrix",
    "parse_model",
    "table_for",
    "true_partial_info",
    "write_q_matrix",
]
