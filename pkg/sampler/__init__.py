"""Stick-breaking latent class model and its slice Gibbs sampler."""

from .config import SamplerConfig, load_sampler_config
from .draws import FORMATS, PosteriorDraws, draws_format
from .gibbs import gibbs_step, init_state, run_chain, truncated_beta
from .state import SamplerState, class_membership, stick_weights

__all__ = [
    "FORMATS",
    "PosteriorDraws",
    "SamplerConfig",
    "SamplerState",
    "class_membership",
    "draws_format",
    "gibbs_step",
    "init_state",
    "load_sampler_config",
    "run_chain",
    "stick_weights",
    "truncated_beta",
]
