"""Response datasets and their CSV format.

The main file is a header-bearing CSV with one column per item named ``Y<j>:k<k_j>``
(the category count travels in the header) and responses coded 1..k_j. True class
labels of simulated data go to a sidecar ``<stem>.labels.csv``, never the main file.
"""

import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from errors import DatasetFormatError, DomainError
from models import ResponseSpec

_HEADER = re.compile(r"^Y(\d+):k(\d+)$")
_PARSER_LINE = re.compile(r"line (\d+)")


@dataclass(frozen=True, eq=False)
class Dataset:
    """n rows of J categorical responses in 1..k_j, with optional true labels."""

    responses: NDArray[np.int_]
    categories: tuple[int, ...]
    labels: NDArray[np.int_] | None = None

    def __post_init__(self):
        y = np.array(self.responses, dtype=np.int_, copy=True)
        categories = ResponseSpec(tuple(self.categories)).categories
        if y.ndim != 2 or y.shape[1] != len(categories):
            raise DomainError(f"Responses must be (n, {len(categories)}), got shape {y.shape}")
        upper = np.asarray(categories)
        bad = np.argwhere((y < 1) | (y > upper[None, :]))
        if bad.size:
            i, j = bad[0]
            raise DomainError(
                f"Row {i + 1}, item {j + 1}: value {y[i, j]} outside 1..{categories[j]}"
            )
        y.flags.writeable = False
        object.__setattr__(self, "responses", y)
        object.__setattr__(self, "categories", categories)
        if self.labels is not None:
            labels = np.array(self.labels, dtype=np.int_, copy=True)
            if labels.shape != (y.shape[0],):
                raise DomainError(f"Labels must have length {y.shape[0]}, got shape {labels.shape}")
            labels.flags.writeable = False
            object.__setattr__(self, "labels", labels)

    @classmethod
    def empty(cls, categories: tuple[int, ...]) -> "Dataset":
        return cls(np.zeros((0, len(categories)), dtype=np.int_), categories)

    @property
    def n(self) -> int:
        return self.responses.shape[0]

    @property
    def n_items(self) -> int:
        return self.responses.shape[1]

    @property
    def spec(self) -> ResponseSpec:
        return ResponseSpec(self.categories)

    def zero_based(self) -> NDArray[np.int_]:
        return self.responses - 1

    @cached_property
    def one_hot(self) -> NDArray[np.float64]:
        """(n, sum k_j) indicator matrix, items laid out consecutively."""
        offsets = np.concatenate([[0], np.cumsum(self.categories)[:-1]])
        out = np.zeros((self.n, sum(self.categories)))
        rows = np.arange(self.n)
        for j, offset in enumerate(offsets):
            out[rows, offset + self.responses[:, j] - 1] = 1.0
        out.flags.writeable = False
        return out

    def without_labels(self) -> "Dataset":
        return Dataset(self.responses, self.categories)


def labels_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}.labels.csv")


def write_dataset(dataset: Dataset, path: str | Path) -> None:
    path = Path(path)
    columns = [f"Y{j + 1}:k{k}" for j, k in enumerate(dataset.categories)]
    pd.DataFrame(dataset.responses, columns=columns).to_csv(path, index=False)
    if dataset.labels is not None:
        pd.DataFrame({"class": dataset.labels}).to_csv(labels_path(path), index=False)


def _categories_from_header(columns: list[str], path: Path) -> tuple[int, ...] | None:
    parsed = [_HEADER.match(str(c).strip()) for c in columns]
    if all(parsed):
        return tuple(int(m.group(2)) for m in parsed if m)
    if any(parsed):
        raise DatasetFormatError(f"{path}: mixed column header formats", line=1)
    return None


def load_dataset(path: str | Path, categories: tuple[int, ...] | None = None) -> Dataset:
    """Read a dataset written by :func:`write_dataset` (or any integer CSV with a header).

    Category counts come from the header, then from `categories`, then from the
    observed maximum of each column (at least 2).
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, skipinitialspace=True)
    except pd.errors.ParserError as e:
        match = _PARSER_LINE.search(str(e))
        line = int(match.group(1)) if match else None
        raise DatasetFormatError(f"{path}: malformed row at line {line}: {e}", line=line) from e
    except (OSError, pd.errors.EmptyDataError) as e:
        raise DatasetFormatError(f"Cannot read dataset {path}: {e}") from e

    missing = frame.isna().any(axis=1).to_numpy()
    if missing.any():
        line = int(np.flatnonzero(missing)[0]) + 2
        raise DatasetFormatError(f"{path}: row at line {line} has missing fields", line=line)
    values = frame.apply(pd.to_numeric, errors="coerce")
    bad = values.isna().to_numpy() | (values.to_numpy(dtype=float) % 1 != 0)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise DatasetFormatError(
            f"{path}: non-integer value {frame.iat[i, j]!r} at line {i + 2}, column {j + 1}", line=int(i) + 2
        )
    responses = values.to_numpy(dtype=np.int_)

    header = _categories_from_header(list(frame.columns), path)
    spec = header or categories
    if spec is None:
        spec = tuple(max(2, int(col.max(initial=1))) for col in responses.T)
    if len(spec) != responses.shape[1]:
        raise DatasetFormatError(f"{path}: {responses.shape[1]} columns but {len(spec)} category counts")

    upper = np.asarray(spec)
    out_of_range = np.argwhere((responses < 1) | (responses > upper[None, :]))
    if out_of_range.size:
        i, j = out_of_range[0]
        raise DatasetFormatError(
            f"{path}: value {responses[i, j]} at line {i + 2}, item {j + 1} is outside 1..{spec[j]}",
            line=int(i) + 2,
        )

    labels = None
    sidecar = labels_path(path)
    if sidecar.exists():
        labels = pd.read_csv(sidecar)["class"].to_numpy(dtype=np.int_)
    return Dataset(responses, tuple(spec), labels)
