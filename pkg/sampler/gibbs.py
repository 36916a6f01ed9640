"""Slice Gibbs sampler for the stick-breaking latent class model.

The model puts a Beta(1, beta) stick-breaking prior on the class weights, Dirichlet(1)
priors on every p_{j, alpha} and, optionally, a Gamma(1, 1) hyperprior on beta. Slice
variables u_i keep every sweep finite: only classes with pi_alpha > u_i are candidates
for respondent i, and sticks are materialized until the unassigned mass falls below
min_i u_i, so the model is never truncated.
"""

import math

import numpy as np
from numpy.typing import NDArray
from sklearn.cluster import KMeans

from errors import SamplerFault
from logging_config import get_logger
from simulation import Dataset, get_rng

from .config import SamplerConfig
from .draws import PosteriorDraws
from .state import SamplerState, class_membership, stick_weights

log = get_logger(__name__)

LOG_FLOOR = 1e-300
TINY = np.finfo(float).tiny


def truncated_beta(
    lower: float | NDArray,
    upper: float | NDArray,
    beta: float,
    rng: np.random.Generator,
    size: int | None = None,
) -> float | NDArray:
    """Beta(1, beta) restricted to [lower, upper], by inverting F(v) = 1 - (1 - v)^beta.

    The uniform is drawn on the survival scale (1 - v)^beta, which keeps precision when
    the interval sits close to 1.
    """
    s_low = np.power(1.0 - np.asarray(upper, dtype=float), beta)
    s_high = np.power(1.0 - np.asarray(lower, dtype=float), beta)
    s = rng.uniform(s_low, s_high, size=size)
    v = 1.0 - np.power(s, 1.0 / beta)
    return np.clip(v, TINY, 1.0 - np.finfo(float).eps)


def _split(values: NDArray, categories: tuple[int, ...]) -> list[NDArray]:
    return np.split(values, np.cumsum(categories)[:-1], axis=1)


def _dirichlet_rows(concentration: NDArray, rng: np.random.Generator) -> NDArray:
    draws = rng.standard_gamma(concentration)
    return draws / draws.sum(axis=1, keepdims=True)


def _category_counts(labels: NDArray[np.int_], one_hot: NDArray, n_classes: int) -> NDArray:
    membership = np.zeros((labels.size, n_classes))
    membership[np.arange(labels.size), labels] = 1.0
    return membership.T @ one_hot


def _posterior_probs(
    labels: NDArray[np.int_], data: Dataset, n_classes: int, rng: np.random.Generator
) -> tuple[NDArray, ...]:
    """p_{j, alpha} ~ Dirichlet(1 + category counts) for alpha < n_classes."""
    counts = _category_counts(labels, data.one_hot, n_classes)
    return tuple(_dirichlet_rows(1.0 + c, rng) for c in _split(counts, data.categories))


def _extend_sticks(
    sticks: NDArray,
    probs: tuple[NDArray, ...],
    threshold: float,
    beta: float,
    config: SamplerConfig,
    rng: np.random.Generator,
    iteration: int | None,
) -> tuple[NDArray, tuple[NDArray, ...]]:
    """Draw new sticks and item tables from the prior until the leftover mass < threshold."""
    new_sticks: list[float] = []
    leftover = float(np.prod(1.0 - sticks))
    while leftover >= threshold:
        if sticks.size + len(new_sticks) >= config.max_sticks:
            raise SamplerFault(
                f"stick extension exceeded {config.max_sticks} sticks",
                iteration=iteration,
                diagnostic={"leftover": leftover, "min_slice": threshold, "beta": beta},
            )
        v = float(rng.beta(1.0, beta))
        new_sticks.append(v)
        leftover *= 1.0 - v
    if not new_sticks:
        return sticks, probs
    m = len(new_sticks)
    probs = tuple(np.vstack([p, rng.dirichlet(np.ones(p.shape[1]), size=m)]) for p in probs)
    return np.concatenate([sticks, new_sticks]), probs


def init_state(data: Dataset, config: SamplerConfig, rng: np.random.Generator) -> SamplerState:
    """Starting point: k-means on the response vectors into ceil(log2 n) seed classes.

    Seed classes are numbered by decreasing size, sticks come from the prior and the
    slice variables are drawn under the resulting weights.
    """
    n = data.n
    labels = np.zeros(n, dtype=np.int_)
    if n > 1:
        distinct = np.unique(data.responses, axis=0).shape[0]
        k = min(max(1, math.ceil(math.log2(n))), distinct)
        if k > 1:
            kmeans = KMeans(n_clusters=k, n_init=10, random_state=int(rng.integers(2**31 - 1)))
            labels = kmeans.fit_predict(data.responses.astype(float))
            order = np.argsort(-np.bincount(labels, minlength=k), kind="stable")
            rank = np.empty(k, dtype=np.int_)
            rank[order] = np.arange(k)
            labels = rank[labels]

    n_classes = int(labels.max()) + 1 if n else 1
    sticks = rng.beta(1.0, config.beta, size=n_classes)
    probs = _posterior_probs(labels, data, n_classes, rng)
    slices = np.maximum(rng.uniform(0.0, stick_weights(sticks)[labels]), TINY)
    threshold = float(slices.min()) if n else 1.0
    sticks, probs = _extend_sticks(sticks, probs, threshold, config.beta, config, rng, None)
    log.debug("chain_initialized", n=n, seed_classes=n_classes, sticks=sticks.size)
    return SamplerState(sticks, probs, labels, slices, config.beta)


def gibbs_step(
    state: SamplerState,
    data: Dataset,
    config: SamplerConfig,
    rng: np.random.Generator,
    iteration: int | None = None,
) -> SamplerState:
    """One sweep: slices, item tables, sticks, stick extension, labels, then beta."""
    n = data.n
    labels = state.labels

    # u_i ~ U(0, pi_{alpha_i})
    slices = np.maximum(rng.uniform(0.0, state.weights[labels]), TINY)

    n_active = state.n_active
    probs = _posterior_probs(labels, data, n_active, rng)

    # V_alpha ~ Beta(1, beta) truncated so every slice stays under its class weight
    sticks = np.array(state.sticks[:n_active], copy=True)
    occupied = np.bincount(labels, minlength=n_active) > 0
    top_slice = np.zeros(n_active)
    np.maximum.at(top_slice, labels, slices)
    for a in range(n_active):
        pi = stick_weights(sticks)
        lower = top_slice[a] / np.prod(1.0 - sticks[:a]) if occupied[a] else 0.0
        later = np.flatnonzero(occupied[a + 1 :]) + a + 1
        upper = 1.0 - (1.0 - sticks[a]) * np.max(top_slice[later] / pi[later]) if later.size else 1.0
        if not lower < upper:
            raise SamplerFault(
                f"empty truncation interval for stick {a + 1}",
                iteration=iteration,
                diagnostic={"stick": a + 1, "lower": float(lower), "upper": float(upper)},
            )
        sticks[a] = truncated_beta(lower, upper, state.beta, rng)

    threshold = float(slices.min()) if n else 1.0
    sticks, probs = _extend_sticks(sticks, probs, threshold, state.beta, config, rng, iteration)

    # alpha_i over A_i = {alpha : pi_alpha > u_i}, weights prod_j p_{j alpha}^{y_ij}
    pi = stick_weights(sticks)
    if n:
        log_probs = np.log(np.maximum(np.hstack(probs), LOG_FLOOR))
        loglik = data.one_hot @ log_probs.T
        allowed = pi[None, :] > slices[:, None]
        if not allowed.any(axis=1).all():
            raise SamplerFault(
                "respondent with no admissible class",
                iteration=iteration,
                diagnostic={"min_slice": threshold, "sticks": sticks.size},
            )
        loglik = np.where(allowed, loglik, -np.inf)
        weights = np.exp(loglik - loglik.max(axis=1, keepdims=True))
        cumulative = weights.cumsum(axis=1)
        u = rng.random(n) * cumulative[:, -1]
        labels = np.argmax(cumulative > u[:, None], axis=1)

    beta = state.beta
    if config.hyperprior:
        # beta | V ~ Gamma(1 + M, 1 - sum_{alpha <= M} log(1 - V_alpha)), M = max_i alpha_i
        m = int(labels.max()) + 1 if n else 0
        rate = 1.0 - np.log1p(-sticks[:m]).sum()
        beta = float(rng.gamma(1.0 + m, 1.0 / rate))

    return SamplerState(sticks, probs, labels, slices, beta)


def run_chain(
    data: Dataset, config: SamplerConfig, rng: np.random.Generator | None = None
) -> PosteriorDraws:
    """Burn in, then keep every `thin`-th state as a posterior draw of (p, pi)."""
    rng = rng if rng is not None else get_rng(config.seed)
    state = init_state(data, config, rng)
    iterations: list[int] = []
    weights: list[NDArray] = []
    probs: list[tuple[NDArray, ...]] = []

    for it in range(config.iterations):
        try:
            state = gibbs_step(state, data, config, rng, iteration=it)
            if config.check_invariants:
                state.check_invariants(it)
        except SamplerFault as e:
            if e.iteration is None:
                e.iteration = it
            log.error("sampler_fault", iteration=e.iteration, error=str(e), **e.diagnostic)
            raise
        if it >= config.burn_in and (it - config.burn_in) % config.thin == 0:
            iterations.append(it)
            weights.append(state.weights)
            probs.append(tuple(np.array(p) for p in state.probs))
        if (it + 1) % config.progress_every == 0:
            log.info(
                "chain_progress",
                iteration=it + 1,
                total=config.iterations,
                active=state.n_active,
                sticks=state.n_sticks,
                beta=round(state.beta, 4),
            )

    return PosteriorDraws(
        categories=data.categories,
        iterations=np.array(iterations, dtype=np.int_),
        weights=tuple(weights),
        probs=tuple(probs),
        n_observations=data.n,
        membership=class_membership(state),
    )
