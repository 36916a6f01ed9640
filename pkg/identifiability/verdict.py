"""Identifiability verdicts and item partitions."""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field, ValidationError, model_validator

from errors import ConfigError, DomainError

DISCLAIMER = (
    "sufficient-condition check only: FAIL means the condition was not verified, "
    "not that the model is proven nonidentifiable"
)


@dataclass(frozen=True)
class ItemPartition:
    """Three pairwise disjoint, nonempty item subsets (0-based item indices)."""

    subsets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        subsets = tuple(tuple(sorted(int(j) for j in s)) for s in self.subsets)
        if len(subsets) != 3:
            raise DomainError(f"An item partition has three subsets, got {len(subsets)}")
        if any(not s for s in subsets):
            raise DomainError("Every subset of an item partition must be nonempty")
        members = [j for s in subsets for j in s]
        if len(members) != len(set(members)):
            raise DomainError(f"Item subsets overlap: {self.one_based()}")
        if min(members) < 0:
            raise DomainError("Item indices must be nonnegative")
        object.__setattr__(self, "subsets", subsets)

    @classmethod
    def from_one_based(cls, subsets: list[list[int]]) -> "ItemPartition":
        return cls(tuple(tuple(j - 1 for j in s) for s in subsets))

    @property
    def items(self) -> tuple[int, ...]:
        return tuple(sorted(j for s in self.subsets for j in s))

    def check_items(self, n_items: int) -> None:
        if max(self.items) >= n_items:
            raise DomainError(f"Item partition {self.one_based()} refers to items beyond {n_items}")

    def one_based(self) -> list[list[int]]:
        return [[j + 1 for j in s] for s in self.subsets]


class _PartitionDocument(BaseModel):
    subsets: list[list[int]]


def load_partition(path: str | Path) -> ItemPartition:
    """Read ``{"subsets": [[1, 4, 7], [2, 5, 8], [3, 6, 9]]}`` (1-based items)."""
    try:
        document = _PartitionDocument.model_validate_json(Path(path).read_text())
    except (OSError, ValidationError) as e:
        raise ConfigError(f"Cannot read item partition {path}: {e}") from e
    return ItemPartition.from_one_based(document.subsets)


def write_partition(partition: ItemPartition, path: str | Path) -> None:
    Path(path).write_text(json.dumps({"subsets": partition.one_based()}) + "\n")


class IdentifiabilityVerdict(BaseModel):
    """Outcome of one sufficient-condition check.

    `passed` is always the conjunction of `conditions`.
    """

    theorem: str
    passed: bool
    conditions: dict[str, bool]
    certificate: dict[str, Any] = Field(default_factory=dict)
    diagnostics: list[str] = Field(default_factory=list)
    note: str = DISCLAIMER

    @model_validator(mode="after")
    def _conjunction(self) -> "IdentifiabilityVerdict":
        if self.passed != all(self.conditions.values()):
            raise ValueError("passed must equal the conjunction of the conditions")
        return self

    @classmethod
    def from_conditions(
        cls,
        theorem: str,
        conditions: dict[str, bool],
        certificate: dict[str, Any] | None = None,
        diagnostics: list[str] | None = None,
    ) -> "IdentifiabilityVerdict":
        return cls(
            theorem=theorem,
            passed=all(conditions.values()),
            conditions=conditions,
            certificate=certificate or {},
            diagnostics=diagnostics or [],
        )

    def render(self) -> str:
        lines = [f"{self.theorem}: {'PASS' if self.passed else 'FAIL'}"]
        width = max((len(name) for name in self.conditions), default=0)
        for name, ok in self.conditions.items():
            lines.append(f"  {name:<{width}}  {'ok' if ok else 'FAILED'}")
        for key, value in self.certificate.items():
            lines.append(f"  certificate.{key}: {json.dumps(value)}")
        for message in self.diagnostics:
            lines.append(f"  ! {message}")
        lines.append(f"  ({self.note})")
        return "\n".join(lines)
