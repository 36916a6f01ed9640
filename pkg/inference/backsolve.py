"""Recovering structural parameters from an estimated response table."""

import itertools
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.special import logit

from errors import DomainError, SingularDesignError, UnsupportedModelError
from logging_config import get_logger
from models import CRUM, DINA, DINO, LCDM, NIDA, ItemResponseModel, QMatrix, ReducedNCRUM

from .estimate import PointEstimate

log = get_logger(__name__)

SUPPORTED = ("DINA", "DINO", "NIDA", "NC-RUM", "C-RUM", "LCDM")
CLIP = 1e-6


@dataclass(frozen=True, eq=False)
class BackSolveResult:
    """Fitted model and per-item residual norms on the probability scale."""

    model: ItemResponseModel
    residuals: NDArray[np.float64]

    @property
    def residual_norm(self) -> float:
        return float(np.sqrt((self.residuals**2).sum()))


def _lstsq(design: NDArray, target: NDArray, item: int) -> NDArray:
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise SingularDesignError(
            f"Item {item + 1}: regression design of rank {np.linalg.matrix_rank(design)} "
            f"for {design.shape[1]} parameters",
            item=item,
        )
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    return coef


def _in_unit(values: NDArray) -> NDArray:
    return np.clip(values, CLIP, 1.0 - CLIP)


def _slip_guess(
    p: NDArray, q: QMatrix, profiles: NDArray, ideal: Callable[[NDArray, NDArray], NDArray]
) -> tuple[NDArray, NDArray]:
    slip, guess = np.empty(q.n_items), np.empty(q.n_items)
    for j in range(q.n_items):
        capable = ideal(profiles, q.row(j))
        if capable.all() or not capable.any():
            raise SingularDesignError(
                f"Item {j + 1}: every class falls on one side of the ideal response", item=j
            )
        slip[j] = 1.0 - p[j, capable].mean()
        guess[j] = p[j, ~capable].mean()
    return _in_unit(slip), _in_unit(guess)


def _dina(p, q, profiles) -> ItemResponseModel:
    return DINA(*_slip_guess(p, q, profiles, lambda a, row: np.all(a >= row, axis=1)))


def _dino(p, q, profiles) -> ItemResponseModel:
    return DINO(*_slip_guess(p, q, profiles, lambda a, row: np.any((a == 1) & (row == 1), axis=1)))


def _nida(p, q, profiles) -> ItemResponseModel:
    # one (s_j, g_j) pair per item: log p = m log(1 - s_j) + u log g_j
    slip = np.full(q.entries.shape, np.nan)
    guess = np.full(q.entries.shape, np.nan)
    for j in range(q.n_items):
        required = list(q.required(j))
        mastered = profiles[:, required].sum(axis=1)
        design = np.column_stack([mastered, len(required) - mastered]).astype(float)
        a, b = _lstsq(design, np.log(_in_unit(p[j])), j)
        slip[j, required] = 1.0 - np.exp(a)
        guess[j, required] = np.exp(b)
    return NIDA(_in_unit(slip), _in_unit(guess))


def _ncrum(p, q, profiles) -> ItemResponseModel:
    phi = np.empty(q.n_items)
    r = np.full(q.entries.shape, np.nan)
    for j in range(q.n_items):
        required = list(q.required(j))
        design = np.column_stack([np.ones(len(profiles)), 1 - profiles[:, required]]).astype(float)
        coef = _lstsq(design, np.log(_in_unit(p[j])), j)
        phi[j] = np.exp(coef[0])
        r[j, required] = np.exp(coef[1:])
    return ReducedNCRUM(_in_unit(phi), _in_unit(r))


def _crum(p, q, profiles) -> ItemResponseModel:
    intercept = np.empty(q.n_items)
    slopes = np.full(q.entries.shape, np.nan)
    for j in range(q.n_items):
        required = list(q.required(j))
        design = np.column_stack([np.ones(len(profiles)), profiles[:, required]]).astype(float)
        coef = _lstsq(design, logit(_in_unit(p[j])), j)
        intercept[j] = coef[0]
        slopes[j, required] = coef[1:]
    return CRUM(intercept, slopes)


def lcdm_terms(required: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Every nonempty attribute set of `required`, by order then lexicographically."""
    return [t for size in range(1, len(required) + 1) for t in itertools.combinations(required, size)]


def _lcdm(p, q, profiles) -> ItemResponseModel:
    eta = np.empty(q.n_items)
    effects = []
    for j in range(q.n_items):
        terms = lcdm_terms(q.required(j))
        features = [np.all(profiles[:, list(t)] == 1, axis=1) for t in terms]
        design = np.column_stack([np.ones(len(profiles)), *features]).astype(float)
        coef = _lstsq(design, logit(_in_unit(p[j])), j)
        eta[j] = coef[0]
        effects.append(dict(zip(terms, coef[1:].tolist(), strict=True)))
    return LCDM(eta, tuple(effects))


_SOLVERS: dict[str, Callable[[NDArray, QMatrix, NDArray], ItemResponseModel]] = {
    "DINA": _dina,
    "DINO": _dino,
    "NIDA": _nida,
    "NC-RUM": _ncrum,
    "C-RUM": _crum,
    "LCDM": _lcdm,
}


def named_parameters(model: ItemResponseModel, q: QMatrix) -> dict[str, float]:
    """Flat ``name[item,attribute]`` view of a model's structural parameters (1-based)."""
    out: dict[str, float] = {}
    for j in range(q.n_items):
        required = q.required(j)
        if isinstance(model, DINA | DINO):
            out[f"s[{j + 1}]"] = float(model.slip[j])
            out[f"g[{j + 1}]"] = float(model.guess[j])
        elif isinstance(model, NIDA):
            for k in required:
                out[f"s[{j + 1},{k + 1}]"] = float(model.slip[j, k])
                out[f"g[{j + 1},{k + 1}]"] = float(model.guess[j, k])
        elif isinstance(model, ReducedNCRUM):
            out[f"phi[{j + 1}]"] = float(model.phi[j])
            for k in required:
                out[f"r[{j + 1},{k + 1}]"] = float(model.r[j, k])
        elif isinstance(model, CRUM):
            out[f"b0[{j + 1}]"] = float(model.intercept[j])
            for k in required:
                out[f"b[{j + 1},{k + 1}]"] = float(model.slopes[j, k])
        elif isinstance(model, LCDM):
            out[f"eta[{j + 1}]"] = float(model.eta[j])
            for term in lcdm_terms(required):
                key = ",".join(str(k + 1) for k in term)
                out[f"lambda[{j + 1};{key}]"] = float(model.effects[j].get(term, 0.0))
        else:
            raise UnsupportedModelError(f"{model.family} has no structural parameters")
    return out


def back_solve_params(
    est: PointEstimate, q: QMatrix, family: str, profiles: NDArray[np.int_]
) -> BackSolveResult:
    """Fit `family` to the estimated success probabilities item by item.

    `profiles` gives the (binary) attribute profile of each estimated class, from a
    label alignment or a reconstructed coding. DINA and DINO use group means, NIDA and
    NC-RUM a log-linear least-squares fit and C-RUM and LCDM a least-squares fit on the
    logit scale.
    """
    if family not in _SOLVERS:
        raise UnsupportedModelError(f"Cannot back-solve family '{family}'; expected one of {', '.join(SUPPORTED)}")
    table = est.table()
    if not table.is_binary:
        raise UnsupportedModelError("Back-solving needs binary responses")
    profiles = np.asarray(profiles, dtype=np.int_)
    if profiles.shape != (est.n_classes, q.n_attributes):
        raise DomainError(f"Expected ({est.n_classes}, {q.n_attributes}) profiles, got {profiles.shape}")
    if q.n_items != est.n_items:
        raise DomainError(f"Q-matrix has {q.n_items} items, estimate has {est.n_items}")

    p = table.success()
    model = _SOLVERS[family](p, q, profiles)
    fitted = model.success_probs(q, profiles)
    residuals = np.sqrt(((fitted - p) ** 2).sum(axis=1))
    log.debug("back_solved", family=family, residual=float(np.sqrt((residuals**2).sum())))
    return BackSolveResult(model, residuals)
