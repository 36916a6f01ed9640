"""Q-matrices, attribute spaces and response spaces."""

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.typing import NDArray

from config import get_config
from errors import DomainError, SizeLimitError


def _frozen(array: NDArray) -> NDArray:
    array = np.array(array, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class QMatrix:
    """Binary J x K item-by-attribute loading design.

    Rows are items, columns attributes. Every item must load on at least one
    attribute unless ``allow_empty_rows`` is set (reconstructed Q-matrices may carry
    flagged all-zero rows for uninformative items).
    """

    entries: NDArray[np.int_]
    allow_empty_rows: bool = field(default=False, repr=False)

    def __post_init__(self):
        entries = np.asarray(self.entries)
        if entries.ndim != 2 or entries.shape[0] == 0 or entries.shape[1] == 0:
            raise DomainError(f"Q-matrix must be a non-empty 2-D array, got shape {entries.shape}")
        if not np.isin(entries, (0, 1)).all():
            raise DomainError("Q-matrix entries must be 0 or 1")
        empty = np.flatnonzero(entries.sum(axis=1) == 0)
        if empty.size and not self.allow_empty_rows:
            raise DomainError(f"Q-matrix rows {[int(j) + 1 for j in empty]} load on no attribute")
        object.__setattr__(self, "entries", _frozen(entries.astype(np.int_)))

    @property
    def n_items(self) -> int:
        return self.entries.shape[0]

    @property
    def n_attributes(self) -> int:
        return self.entries.shape[1]

    def row(self, j: int) -> NDArray[np.int_]:
        return self.entries[j]

    def required(self, j: int) -> tuple[int, ...]:
        """Attributes item j loads on."""
        return tuple(int(k) for k in np.flatnonzero(self.entries[j]))

    def unit_rows(self, k: int) -> list[int]:
        """Items whose row equals the unit vector e_k."""
        unit = np.zeros(self.n_attributes, dtype=np.int_)
        unit[k] = 1
        return [j for j in range(self.n_items) if np.array_equal(self.entries[j], unit)]

    def empty_rows(self) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.entries.sum(axis=1) == 0)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash(self.entries.tobytes())

    def to_list(self) -> list[list[int]]:
        return self.entries.tolist()


@dataclass(frozen=True)
class AttributeSpace:
    """Product space of K discrete attributes with d_k levels each.

    Classes are enumerated in mixed-radix ascending order over (alpha^1, ..., alpha^K)
    with alpha^K varying fastest.
    """

    levels: tuple[int, ...]

    def __post_init__(self):
        levels = tuple(int(d) for d in self.levels)
        if not levels:
            raise DomainError("Attribute space needs at least one attribute")
        if any(d < 2 for d in levels):
            raise DomainError(f"Every attribute needs at least 2 levels, got {levels}")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def binary(cls, n_attributes: int) -> "AttributeSpace":
        return cls((2,) * n_attributes)

    @property
    def n_attributes(self) -> int:
        return len(self.levels)

    @property
    def size(self) -> int:
        return math.prod(self.levels)

    @property
    def is_binary(self) -> bool:
        return all(d == 2 for d in self.levels)

    def check_size(self, cap: int | None = None) -> int:
        cap = cap if cap is not None else get_config().max_classes
        if self.size > cap:
            raise SizeLimitError(
                f"Attribute space has {self.size} classes, above the cap of {cap}",
                size=self.size,
                cap=cap,
            )
        return self.size

    @cached_property
    def _profiles(self) -> NDArray[np.int_]:
        self.check_size()
        grid = np.array(list(itertools.product(*(range(d) for d in self.levels))), dtype=np.int_)
        return _frozen(grid.reshape(self.size, self.n_attributes))

    def profiles(self) -> NDArray[np.int_]:
        """All M profiles as an (M, K) array in enumeration order."""
        return self._profiles

    def profile(self, index: int) -> tuple[int, ...]:
        return tuple(int(v) for v in np.unravel_index(index, self.levels))

    def index_of(self, profile: tuple[int, ...] | NDArray) -> int:
        profile = tuple(int(v) for v in profile)
        if len(profile) != self.n_attributes or any(
            not 0 <= v < d for v, d in zip(profile, self.levels, strict=True)
        ):
            raise DomainError(f"Profile {profile} is not in the attribute space {self.levels}")
        return int(np.ravel_multi_index(profile, self.levels))


@dataclass(frozen=True)
class ResponseSpec:
    """Number of response categories k_j for each item."""

    categories: tuple[int, ...]

    def __post_init__(self):
        categories = tuple(int(k) for k in self.categories)
        if not categories:
            raise DomainError("Response spec needs at least one item")
        if any(k < 2 for k in categories):
            raise DomainError(f"Every item needs at least 2 categories, got {categories}")
        object.__setattr__(self, "categories", categories)

    @classmethod
    def binary(cls, n_items: int) -> "ResponseSpec":
        return cls((2,) * n_items)

    @property
    def n_items(self) -> int:
        return len(self.categories)

    @property
    def is_binary(self) -> bool:
        return all(k == 2 for k in self.categories)

    def n_patterns(self, items: list[int] | tuple[int, ...] | None = None) -> int:
        """kappa for the given item subset (all items by default); exact Python int."""
        if items is None:
            return math.prod(self.categories)
        return math.prod(self.categories[j] for j in items)
