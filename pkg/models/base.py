"""Base class for all item response parameterizations."""

from abc import ABC, abstractmethod
from typing import Any, ClassVar

import numpy as np
from numpy.typing import NDArray

from errors import DomainError, UnsupportedModelError

from .space import AttributeSpace, QMatrix, ResponseSpec


def _check_binary_profiles(profiles: NDArray) -> None:
    if not np.isin(profiles, (0, 1)).all():
        raise UnsupportedModelError("Parametric families are defined on binary attributes only")


def ideal_response_dina(profile: Any, qrow: Any) -> int:
    """Conjunctive ideal response: 1 iff alpha_k >= q_jk for every k (0^0 = 1)."""
    profile, qrow = np.asarray(profile), np.asarray(qrow)
    _check_binary_profiles(profile)
    if profile.shape != qrow.shape:
        raise DomainError(f"Profile length {profile.size} does not match q-row length {qrow.size}")
    return int(np.all(profile >= qrow))


def ideal_response_dino(profile: Any, qrow: Any) -> int:
    """Disjunctive ideal response: 1 - prod_k (1 - alpha_k)^q_jk, empty product = 1."""
    profile, qrow = np.asarray(profile), np.asarray(qrow)
    _check_binary_profiles(profile)
    if profile.shape != qrow.shape:
        raise DomainError(f"Profile length {profile.size} does not match q-row length {qrow.size}")
    return int(np.any((profile == 1) & (qrow == 1)))


def _in_open_unit(values: NDArray, name: str, mask: NDArray | None = None) -> None:
    values = np.asarray(values, dtype=float)
    if mask is not None:
        values = values[np.asarray(mask, dtype=bool)]
    if values.size and not np.all((values > 0) & (values < 1)):
        raise DomainError(f"Parameter '{name}' must lie in (0, 1), got {values.tolist()}")


class ItemResponseModel(ABC):
    """Abstract base class for a DCM parameterization.

    Parametric families map (Q, alpha) to the success probability p_{j,alpha} of a
    binary item; the saturated family stores a full response table instead.
    """

    family: ClassVar[str]
    parametric: ClassVar[bool] = True

    @abstractmethod
    def validate(self, q: QMatrix) -> None:
        """Raise DomainError if the parameters do not fit `q`."""

    @abstractmethod
    def _success(self, q: QMatrix, profiles: NDArray[np.int_]) -> NDArray[np.float64]:
        """Success probabilities as a (J, M) array for binary `profiles`."""

    def success_probs(self, q: QMatrix, profiles: NDArray[np.int_]) -> NDArray[np.float64]:
        """Validated (J, M) success probabilities for the given (M, K) profiles."""
        profiles = np.atleast_2d(np.asarray(profiles, dtype=np.int_))
        _check_binary_profiles(profiles)
        if profiles.shape[1] != q.n_attributes:
            raise DomainError(
                f"Profiles have {profiles.shape[1]} attributes, Q-matrix has {q.n_attributes}"
            )
        self.validate(q)
        return self._success(q, profiles)

    def category_probs(
        self, q: QMatrix, space: AttributeSpace, spec: ResponseSpec
    ) -> tuple[NDArray[np.float64], ...]:
        """Per-item (M, k_j) response distributions."""
        if not space.is_binary:
            raise UnsupportedModelError(f"{self.family} requires binary attributes, got {space.levels}")
        if not spec.is_binary:
            raise UnsupportedModelError(f"{self.family} is defined for binary responses only")
        p = self.success_probs(q, space.profiles())
        return tuple(np.column_stack([1.0 - p[j], p[j]]) for j in range(p.shape[0]))

    def response_prob(
        self, q: QMatrix, j: int, profile: Any, space: AttributeSpace | None = None
    ) -> NDArray[np.float64]:
        """Categorical distribution (1 - p, p) of item j at one profile."""
        p = self.success_probs(q, np.asarray(profile)[None, :])[j, 0]
        return np.array([1.0 - p, p])

    @abstractmethod
    def to_document(self) -> dict[str, Any]:
        """Structured key-value form for the model parameter file."""
