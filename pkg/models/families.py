"""The DCM parameterizations: DINA, DINO, NIDA, reduced NC-RUM, C-RUM, LCDM, saturated."""

from abc import abstractmethod
from dataclasses import dataclass, field
from typing import Any, ClassVar

import numpy as np
from numpy.typing import NDArray
from scipy.special import expit

from errors import DomainError

from .base import ItemResponseModel, _in_open_unit
from .space import AttributeSpace, QMatrix, ResponseSpec


def _vector(values: Any, n: int, name: str) -> NDArray[np.float64]:
    array = np.asarray(values, dtype=float)
    if array.shape != (n,):
        raise DomainError(f"Parameter '{name}' needs {n} values, got shape {array.shape}")
    return array


def _matrix(values: Any, q: QMatrix, name: str) -> NDArray[np.float64]:
    array = np.asarray(values, dtype=float)
    if array.shape != q.entries.shape:
        raise DomainError(f"Parameter '{name}' needs shape {q.entries.shape}, got {array.shape}")
    return array


def _freeze(values: Any) -> NDArray[np.float64]:
    array = np.array(values, dtype=float, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class _SlipGuess(ItemResponseModel):
    slip: NDArray[np.float64]
    guess: NDArray[np.float64]

    def __post_init__(self):
        object.__setattr__(self, "slip", _freeze(self.slip))
        object.__setattr__(self, "guess", _freeze(self.guess))

    def validate(self, q: QMatrix) -> None:
        _in_open_unit(_vector(self.slip, q.n_items, "slip"), "slip")
        _in_open_unit(_vector(self.guess, q.n_items, "guess"), "guess")

    def non_monotone_items(self) -> list[int]:
        """Items violating 1 - s_j > g_j."""
        return [int(j) for j in np.flatnonzero(1.0 - self.slip <= self.guess)]

    @staticmethod
    @abstractmethod
    def _ideal(q: QMatrix, profiles: NDArray[np.int_]) -> NDArray[np.bool_]:
        """Ideal response eta_{j alpha} of every item and profile."""

    def _success(self, q: QMatrix, profiles: NDArray[np.int_]) -> NDArray[np.float64]:
        ideal = self._ideal(q, profiles)
        return np.where(ideal, (1.0 - self.slip)[:, None], self.guess[:, None])

    def to_document(self) -> dict[str, Any]:
        return {"family": self.family, "slip": self.slip.tolist(), "guess": self.guess.tolist()}


@dataclass(frozen=True, eq=False)
class DINA(_SlipGuess):
    """Deterministic input, noisy AND gate: p = (1 - s_j)^xi g_j^(1 - xi)."""

    family: ClassVar[str] = "DINA"

    @staticmethod
    def _ideal(q: QMatrix, profiles: NDArray[np.int_]) -> NDArray[np.bool_]:
        return np.all(profiles[None, :, :] >= q.entries[:, None, :], axis=2)


@dataclass(frozen=True, eq=False)
class DINO(_SlipGuess):
    """Deterministic input, noisy OR gate."""

    family: ClassVar[str] = "DINO"

    @staticmethod
    def _ideal(q: QMatrix, profiles: NDArray[np.int_]) -> NDArray[np.bool_]:
        return np.any((profiles[None, :, :] == 1) & (q.entries[:, None, :] == 1), axis=2)


@dataclass(frozen=True, eq=False)
class NIDA(ItemResponseModel):
    """Noisy input, deterministic AND gate.

    `slip` and `guess` are J x K arrays (s_jk, g_jk); use :meth:`per_attribute` for the
    classical form with one (s_k, g_k) pair per attribute shared by every item.
    Entries where q_jk = 0 are ignored.
    """

    family: ClassVar[str] = "NIDA"

    slip: NDArray[np.float64]
    guess: NDArray[np.float64]

    def __post_init__(self):
        object.__setattr__(self, "slip", _freeze(self.slip))
        object.__setattr__(self, "guess", _freeze(self.guess))

    @classmethod
    def per_attribute(cls, slip: Any, guess: Any, n_items: int) -> "NIDA":
        slip, guess = np.asarray(slip, dtype=float), np.asarray(guess, dtype=float)
        return cls(np.tile(slip, (n_items, 1)), np.tile(guess, (n_items, 1)))

    def validate(self, q: QMatrix) -> None:
        mask = q.entries == 1
        _in_open_unit(_matrix(self.slip, q, "slip"), "slip", mask)
        _in_open_unit(_matrix(self.guess, q, "guess"), "guess", mask)

    def _success(self, q: QMatrix, profiles: NDArray[np.int_]) -> NDArray[np.float64]:
        mastered = profiles[None, :, :] == 1
        factor = np.where(mastered, (1.0 - self.slip)[:, None, :], self.guess[:, None, :])
        factor = np.where(q.entries[:, None, :] == 1, factor, 1.0)
        return factor.prod(axis=2)

    def to_document(self) -> dict[str, Any]:
        return {"family": self.family, "slip": _nulls(self.slip), "guess": _nulls(self.guess)}


@dataclass(frozen=True, eq=False)
class ReducedNCRUM(ItemResponseModel):
    """Reduced noncompensatory RUM: p = phi_j prod_k r_jk^(q_jk (1 - alpha_k))."""

    family: ClassVar[str] = "NC-RUM"

    phi: NDArray[np.float64]
    r: NDArray[np.float64]

    def __post_init__(self):
        object.__setattr__(self, "phi", _freeze(self.phi))
        object.__setattr__(self, "r", _freeze(self.r))

    def validate(self, q: QMatrix) -> None:
        _in_open_unit(_vector(self.phi, q.n_items, "phi"), "phi")
        _in_open_unit(_matrix(self.r, q, "r"), "r", q.entries == 1)

    def _success(self, q: QMatrix, profiles: NDArray[np.int_]) -> NDArray[np.float64]:
        penalized = (q.entries[:, None, :] == 1) & (profiles[None, :, :] == 0)
        factor = np.where(penalized, self.r[:, None, :], 1.0)
        return self.phi[:, None] * factor.prod(axis=2)

    def to_document(self) -> dict[str, Any]:
        return {"family": self.family, "phi": self.phi.tolist(), "r": _nulls(self.r)}


@dataclass(frozen=True, eq=False)
class CRUM(ItemResponseModel):
    """Compensatory RUM: logit p = beta_0j + sum_k beta_jk q_jk alpha_k."""

    family: ClassVar[str] = "C-RUM"

    intercept: NDArray[np.float64]
    slopes: NDArray[np.float64]

    def __post_init__(self):
        object.__setattr__(self, "intercept", _freeze(self.intercept))
        object.__setattr__(self, "slopes", _freeze(self.slopes))

    def validate(self, q: QMatrix) -> None:
        intercept = _vector(self.intercept, q.n_items, "intercept")
        slopes = _matrix(self.slopes, q, "slopes")
        if not np.all(np.isfinite(intercept)) or not np.all(np.isfinite(slopes[q.entries == 1])):
            raise DomainError("C-RUM parameters must be finite")

    def _success(self, q: QMatrix, profiles: NDArray[np.int_]) -> NDArray[np.float64]:
        slopes = np.where(q.entries == 1, self.slopes, 0.0)
        return expit(self.intercept[:, None] + slopes @ profiles.T)

    def to_document(self) -> dict[str, Any]:
        return {"family": self.family, "intercept": self.intercept.tolist(), "slopes": _nulls(self.slopes)}


@dataclass(frozen=True, eq=False)
class LCDM(ItemResponseModel):
    """Log-linear cognitive diagnosis model.

    logit p_j = eta_j + sum over attribute sets S of lambda_{jS} prod_{k in S} alpha_k.
    `effects[j]` maps a tuple of 0-based attributes (main effect, two-way, ... up to the
    full-order term) to lambda; terms that are not listed are zero. `eta` enters as an
    additive intercept (see README for the sign convention).
    """

    family: ClassVar[str] = "LCDM"

    eta: NDArray[np.float64]
    effects: tuple[dict[tuple[int, ...], float], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "eta", _freeze(self.eta))
        effects = tuple(
            {tuple(sorted(int(k) for k in term)): float(v) for term, v in item.items()}
            for item in self.effects
        )
        object.__setattr__(self, "effects", effects)

    def validate(self, q: QMatrix) -> None:
        eta = _vector(self.eta, q.n_items, "eta")
        if len(self.effects) != q.n_items:
            raise DomainError(f"LCDM needs effects for {q.n_items} items, got {len(self.effects)}")
        if not np.all(np.isfinite(eta)):
            raise DomainError("LCDM intercepts must be finite")
        for j, item in enumerate(self.effects):
            allowed = set(q.required(j))
            for term, value in item.items():
                if not term or not set(term) <= allowed:
                    raise DomainError(
                        f"Item {j + 1}: effect on attributes {[k + 1 for k in term]} "
                        f"is not permitted by its q-row"
                    )
                if not np.isfinite(value):
                    raise DomainError(f"Item {j + 1}: effect {term} is not finite")

    def _success(self, q: QMatrix, profiles: NDArray[np.int_]) -> NDArray[np.float64]:
        logits = np.repeat(self.eta[:, None], profiles.shape[0], axis=1)
        for j, item in enumerate(self.effects):
            for term, value in item.items():
                logits[j] += value * np.all(profiles[:, list(term)] == 1, axis=1)
        return expit(logits)

    def to_document(self) -> dict[str, Any]:
        return {
            "family": self.family,
            "eta": self.eta.tolist(),
            "effects": [
                {",".join(str(k + 1) for k in term): value for term, value in item.items()}
                for item in self.effects
            ],
        }


@dataclass(frozen=True, eq=False)
class Saturated(ItemResponseModel):
    """No structural constraint: the full response table is the parameter."""

    family: ClassVar[str] = "saturated"
    parametric: ClassVar[bool] = False

    probs: tuple[NDArray[np.float64], ...]

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(_freeze(p) for p in self.probs))

    def validate(self, q: QMatrix) -> None:
        if len(self.probs) != q.n_items:
            raise DomainError(f"Saturated table has {len(self.probs)} items, Q-matrix has {q.n_items}")

    def _success(self, q: QMatrix, profiles: NDArray[np.int_]) -> NDArray[np.float64]:
        raise DomainError("Saturated models are indexed by class, not by profile; use category_probs")

    def category_probs(
        self, q: QMatrix, space: AttributeSpace, spec: ResponseSpec
    ) -> tuple[NDArray[np.float64], ...]:
        self.validate(q)
        for j, p in enumerate(self.probs):
            if p.shape != (space.size, spec.categories[j]):
                raise DomainError(
                    f"Item {j + 1}: expected a ({space.size}, {spec.categories[j]}) table, got {p.shape}"
                )
        return tuple(np.array(p, copy=True) for p in self.probs)

    def response_prob(
        self, q: QMatrix, j: int, profile: Any, space: AttributeSpace | None = None
    ) -> NDArray[np.float64]:
        if space is None:
            raise DomainError("Saturated models need an AttributeSpace to locate a profile")
        self.validate(q)
        return np.array(self.probs[j][space.index_of(profile)], copy=True)

    def to_document(self) -> dict[str, Any]:
        return {"family": self.family, "probs": [p.tolist() for p in self.probs]}


def _nulls(array: NDArray[np.float64]) -> list[list[float | None]]:
    return [[None if np.isnan(v) else float(v) for v in row] for row in array]


FAMILIES: dict[str, type[ItemResponseModel]] = {
    cls.family: cls for cls in (DINA, DINO, NIDA, ReducedNCRUM, CRUM, LCDM, Saturated)
}
