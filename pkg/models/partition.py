"""Partitions of latent classes into equivalence blocks."""

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray


def _canonical(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    canon = [tuple(sorted(int(c) for c in block)) for block in blocks]
    canon = [block for block in canon if block]
    return tuple(sorted(canon))


@dataclass(frozen=True)
class ClassPartition:
    """A partition of class indices into disjoint blocks.

    Blocks are stored in canonical form (members ascending, blocks ordered by their
    smallest member), so equality is set equality of blocks.
    """

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = _canonical(self.blocks)
        members = [c for block in blocks for c in block]
        if len(members) != len(set(members)):
            raise ValueError(f"Partition blocks overlap: {blocks}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_labels(
        cls, labels: NDArray | Sequence[object], classes: Sequence[int] | None = None
    ) -> "ClassPartition":
        """Group `classes` (default 0..len-1) by equal label."""
        keys = labels.tolist() if isinstance(labels, np.ndarray) else list(labels)
        keys = [tuple(k) if isinstance(k, list) else k for k in keys]
        classes = list(range(len(keys))) if classes is None else list(classes)
        groups: dict[object, list[int]] = {}
        for cls_index, label in zip(classes, keys, strict=True):
            groups.setdefault(label, []).append(cls_index)
        return cls(tuple(tuple(g) for g in groups.values()))

    @classmethod
    def single_block(cls, classes: Iterable[int]) -> "ClassPartition":
        return cls((tuple(classes),))

    @property
    def classes(self) -> tuple[int, ...]:
        return tuple(sorted(c for block in self.blocks for c in block))

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def block_of(self, cls_index: int) -> int:
        """Canonical projection: index of the block containing `cls_index`."""
        for b, block in enumerate(self.blocks):
            if cls_index in block:
                return b
        raise KeyError(cls_index)

    def labels(self) -> dict[int, int]:
        return {c: b for b, block in enumerate(self.blocks) for c in block}

    def relabel(self, mapping: Mapping[int, int]) -> "ClassPartition":
        """Rename every class through `mapping`."""
        return ClassPartition(tuple(tuple(mapping[c] for c in block) for block in self.blocks))

    def restrict(self, classes: Iterable[int]) -> "ClassPartition":
        keep = set(classes)
        return ClassPartition(tuple(tuple(c for c in block if c in keep) for block in self.blocks))

    def same_block(self) -> NDArray[np.bool_]:
        """Boolean matrix over `classes` order: True where two classes share a block."""
        order = self.classes
        position = {c: i for i, c in enumerate(order)}
        out = np.zeros((len(order), len(order)), dtype=bool)
        for block in self.blocks:
            idx = [position[c] for c in block]
            out[np.ix_(idx, idx)] = True
        return out

    def to_list(self) -> list[list[int]]:
        return [list(block) for block in self.blocks]
