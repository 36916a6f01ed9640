"""Mixture weights, seeded streams, datasets and the data generator."""

from .dataset import Dataset, labels_path, load_dataset, write_dataset
from .generator import (
    class_log_likelihood,
    log_likelihood,
    marginal_pattern_probs,
    response_patterns,
    simulate,
)
from .rng import CHAIN, DATA, get_rng, replicate_rng, replicate_seed
from .weights import MixtureWeights, WeightsDocument, load_weights, write_weights

__all__ = [
    "CHAIN",
    "DATA",
    "Dataset",
    "MixtureWeights",
    "WeightsDocument",
    "class_log_likelihood",
    "get_rng",
    "labels_path",
    "load_dataset",
    "load_weights",
    "log_likelihood",
    "marginal_pattern_probs",
    "replicate_rng",
    "replicate_seed",
    "response_patterns",
    "simulate",
    "write_dataset",
]
