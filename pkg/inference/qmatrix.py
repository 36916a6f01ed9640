"""Rebuilding a Q-matrix from per-item class partitions."""

import itertools
import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ValidationError

from config import get_config
from errors import ConfigError, DomainError, InconsistentCodingError, PreconditionError
from logging_config import get_logger
from models import AttributeSpace, ClassPartition, QMatrix

log = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class QReconstruction:
    """Rebuilt Q (possibly with all-zero rows) and the class-to-profile coding used."""

    q: QMatrix
    coding: dict[int, tuple[int, ...]]
    uninformative: tuple[int, ...]

    def to_document(self) -> dict:
        return {
            "q": self.q.to_list(),
            "coding": {str(c + 1): list(p) for c, p in self.coding.items()},
            "uninformative_items": [j + 1 for j in self.uninformative],
        }


class _CodingDocument(BaseModel):
    coding: dict[str, list[int]]


def load_coding(path: str | Path) -> dict[int, tuple[int, ...]]:
    """Read ``{"coding": {"1": [1, 1, 0], ...}}`` with 1-based class keys."""
    try:
        document = _CodingDocument.model_validate_json(Path(path).read_text())
        return {int(c) - 1: tuple(p) for c, p in document.coding.items()}
    except (OSError, ValidationError, ValueError) as e:
        raise ConfigError(f"Cannot read class coding {path}: {e}") from e


def write_coding(coding: Mapping[int, Sequence[int]], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps({"coding": {str(c + 1): list(p) for c, p in sorted(coding.items())}}) + "\n"
    )


def _separated(partitions: Sequence[ClassPartition], classes: tuple[int, ...]) -> NDArray[np.bool_]:
    """(J, C, C) mask: True where item j puts two classes in different blocks."""
    out = []
    for partition in partitions:
        if partition.classes != classes:
            raise DomainError("Every item partition must cover the same classes")
        labels = partition.labels()
        block = np.array([labels[c] for c in classes])
        out.append(block[:, None] != block[None, :])
    return np.array(out)


def _rows_and_violations(
    separated: NDArray[np.bool_], profiles: NDArray[np.int_]
) -> tuple[NDArray[np.int_], NDArray[np.bool_]]:
    """Q-rows and per-item consistency for a batch of codings.

    `profiles` is (N, C, K). q_jk = 1 iff item j separates a pair of classes whose
    profiles differ in coordinate k alone. An item violates the coding when two classes
    that agree on every attribute it requires sit in different blocks.
    """
    differ = profiles[:, :, None, :] != profiles[:, None, :, :]
    single = differ & (differ.sum(axis=3) == 1)[..., None]
    rows, violations = [], []
    for sep in separated:
        q = (single & sep[None, :, :, None]).any(axis=(1, 2))
        agree = ~(differ & q[:, None, None, :]).any(axis=3)
        rows.append(q)
        violations.append((agree & sep[None]).any(axis=(1, 2)))
    return np.stack(rows, axis=1).astype(np.int_), np.stack(violations, axis=1)


def _finish(
    rows: NDArray[np.int_], coding: dict[int, tuple[int, ...]]
) -> QReconstruction:
    q = QMatrix(rows, allow_empty_rows=True)
    empty = tuple(q.empty_rows())
    if empty:
        log.warning("uninformative_items", items=[j + 1 for j in empty])
    return QReconstruction(q, coding, empty)


def reconstruct_q(
    partitions: Sequence[ClassPartition],
    space: AttributeSpace,
    coding: Mapping[int, Sequence[int]] | None = None,
) -> QReconstruction:
    """Minimal Q-matrix explaining every item's partition under a class-to-profile coding.

    Without a coding, every injection of the classes into the profiles of `space` is
    tried (allowed while the space has at most ``coding_search_limit`` profiles); the
    consistent coding with the fewest ones in Q wins, ties going to the first in
    enumeration order. Items whose partition is a single block get an all-zero row and
    are reported as uninformative.
    """
    if not partitions:
        raise PreconditionError("Q reconstruction needs at least one item partition")
    if not space.is_binary:
        raise PreconditionError("Q reconstruction is defined for binary attributes")
    classes = partitions[0].classes
    separated = _separated(partitions, classes)

    if coding is not None:
        if set(coding) != set(classes):
            raise DomainError(f"Coding covers classes {sorted(coding)}, partitions cover {list(classes)}")
        profiles = np.array([coding[c] for c in classes], dtype=np.int_)
        if profiles.shape[1] != space.n_attributes or not np.isin(profiles, (0, 1)).all():
            raise DomainError(f"Coding profiles must be binary vectors of length {space.n_attributes}")
        if np.unique(profiles, axis=0).shape[0] != len(classes):
            raise DomainError("Coding must assign distinct profiles to distinct classes")
        rows, violations = _rows_and_violations(separated, profiles[None])
        bad = [int(j) + 1 for j in np.flatnonzero(violations[0])]
        if bad:
            raise InconsistentCodingError(f"Coding is inconsistent with the partitions of items {bad}", bad)
        return _finish(rows[0], {c: tuple(int(v) for v in p) for c, p in zip(classes, profiles, strict=True)})

    limit = get_config().coding_search_limit
    if space.size > limit:
        raise PreconditionError(
            f"Automatic coding search covers at most {limit} profiles, the space has {space.size}; "
            f"supply a coding"
        )
    if len(classes) > space.size:
        raise PreconditionError(f"{len(classes)} classes cannot be coded by {space.size} profiles")
    candidates = np.array(list(itertools.permutations(range(space.size), len(classes))), dtype=np.int_)
    profiles = space.profiles()[candidates]
    rows, violations = _rows_and_violations(separated, profiles)
    consistent = ~violations.any(axis=1)
    if not consistent.any():
        fewest = int(np.argmin(violations.sum(axis=1)))
        bad = [int(j) + 1 for j in np.flatnonzero(violations[fewest])]
        raise InconsistentCodingError(f"No coding is consistent with the partitions; items {bad} conflict", bad)
    ones = np.where(consistent, rows.sum(axis=(1, 2)), np.iinfo(np.int_).max)
    best = int(np.argmin(ones))
    chosen = {c: tuple(int(v) for v in p) for c, p in zip(classes, profiles[best], strict=True)}
    log.info("coding_selected", candidates=len(candidates), consistent=int(consistent.sum()), ones=int(ones[best]))
    return _finish(rows[best], chosen)
