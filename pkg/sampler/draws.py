"""Retained posterior draws and their on-disk formats.

Two formats are supported:

* ``npz``: compressed numpy archive with ``categories``, ``iterations``, ``counts``
  (materialized classes per draw), ``n_observations``, ``weights`` (draws x max classes)
  and ``p<j>`` (draws x max classes x k_j) per item, NaN beyond each draw's count.
* ``csv``: long format with columns ``draw, iteration, parameter, class, item, category,
  value``. ``parameter`` is ``pi`` (item and category 0), ``p`` or ``n`` (the sample size,
  one row). Classes, items and categories are 1-based.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from errors import DatasetFormatError, UsageError

FORMATS = ("npz", "csv")


def draws_format(path: str | Path, format: str | None = None) -> str:
    format = format or Path(path).suffix.lstrip(".").lower()
    if format not in FORMATS:
        raise UsageError(f"Unknown draws format '{format}'; expected one of {', '.join(FORMATS)}")
    return format


@dataclass(frozen=True, eq=False)
class PosteriorDraws:
    """Retained (p, pi) draws; draw d materializes `weights[d].size` classes."""

    categories: tuple[int, ...]
    iterations: NDArray[np.int_]
    weights: tuple[NDArray[np.float64], ...]
    probs: tuple[tuple[NDArray[np.float64], ...], ...]
    n_observations: int
    membership: NDArray[np.int_] | None = None

    @property
    def n_draws(self) -> int:
        return len(self.weights)

    @property
    def n_items(self) -> int:
        return len(self.categories)

    def active_counts(self) -> NDArray[np.int_]:
        return np.array([w.size for w in self.weights], dtype=np.int_)

    def save(self, path: str | Path, format: str | None = None) -> None:
        if draws_format(path, format) == "npz":
            self._save_npz(Path(path))
        else:
            self._to_frame().to_csv(path, index=False)

    @classmethod
    def load(cls, path: str | Path, format: str | None = None) -> "PosteriorDraws":
        path = Path(path)
        try:
            if draws_format(path, format) == "npz":
                return cls._load_npz(path)
            return cls._from_frame(pd.read_csv(path))
        except (OSError, KeyError, ValueError) as e:
            if isinstance(e, UsageError):
                raise
            raise DatasetFormatError(f"Cannot read posterior draws {path}: {e}") from e

    def _save_npz(self, path: Path) -> None:
        counts = self.active_counts()
        width = int(counts.max(initial=0))
        weights = np.full((self.n_draws, width), np.nan)
        arrays: dict[str, NDArray] = {}
        for d, w in enumerate(self.weights):
            weights[d, : w.size] = w
        for j, k in enumerate(self.categories):
            table = np.full((self.n_draws, width, k), np.nan)
            for d, draw in enumerate(self.probs):
                table[d, : draw[j].shape[0]] = draw[j]
            arrays[f"p{j}"] = table
        if self.membership is not None:
            arrays["membership"] = self.membership
        with path.open("wb") as handle:
            np.savez_compressed(
                handle,
                categories=np.array(self.categories, dtype=np.int_),
                iterations=self.iterations,
                counts=counts,
                n_observations=np.array(self.n_observations),
                weights=weights,
                **arrays,
            )

    @classmethod
    def _load_npz(cls, path: Path) -> "PosteriorDraws":
        with np.load(path) as archive:
            categories = tuple(int(k) for k in archive["categories"])
            counts = archive["counts"]
            weights = tuple(archive["weights"][d, :c] for d, c in enumerate(counts))
            tables = [archive[f"p{j}"] for j in range(len(categories))]
            probs = tuple(tuple(t[d, :c] for t in tables) for d, c in enumerate(counts))
            membership = archive["membership"] if "membership" in archive.files else None
            return cls(
                categories,
                archive["iterations"],
                weights,
                probs,
                int(archive["n_observations"]),
                membership,
            )

    def _to_frame(self) -> pd.DataFrame:
        frames = [
            pd.DataFrame(
                {"draw": [0], "iteration": [0], "parameter": ["n"], "class": [0], "item": [0],
                 "category": [0], "value": [float(self.n_observations)]}
            )
        ]
        for d, (it, w, draw) in enumerate(zip(self.iterations, self.weights, self.probs, strict=True)):
            frames.append(
                pd.DataFrame(
                    {"draw": d + 1, "iteration": int(it), "parameter": "pi",
                     "class": np.arange(1, w.size + 1), "item": 0, "category": 0, "value": w}
                )
            )
            for j, p in enumerate(draw):
                cls_index, category = np.indices(p.shape)
                frames.append(
                    pd.DataFrame(
                        {"draw": d + 1, "iteration": int(it), "parameter": "p",
                         "class": cls_index.ravel() + 1, "item": j + 1,
                         "category": category.ravel() + 1, "value": p.ravel()}
                    )
                )
        return pd.concat(frames, ignore_index=True)

    @classmethod
    def _from_frame(cls, frame: pd.DataFrame) -> "PosteriorDraws":
        n_observations = int(frame.loc[frame["parameter"] == "n", "value"].iloc[0])
        p_rows = frame[frame["parameter"] == "p"]
        categories = tuple(
            int(k) for k in p_rows.groupby("item")["category"].max().sort_index().to_numpy()
        )
        pi_rows = frame[frame["parameter"] == "pi"]
        iterations, weights, probs = [], [], []
        for draw, group in pi_rows.groupby("draw", sort=True):
            group = group.sort_values("class")
            iterations.append(int(group["iteration"].iloc[0]))
            weights.append(group["value"].to_numpy(dtype=float))
            size = len(group)
            rows = p_rows[p_rows["draw"] == draw]
            tables = []
            for j, k in enumerate(categories):
                item = rows[rows["item"] == j + 1].sort_values(["class", "category"])
                tables.append(item["value"].to_numpy(dtype=float).reshape(size, k))
            probs.append(tuple(tables))
        return cls(categories, np.array(iterations, dtype=np.int_), tuple(weights), tuple(probs), n_observations)
