"""Built-in study designs.

``nida``, ``ncrum`` and ``lcdm`` are the three K = 3 simulation designs. ``phobia`` is a
five-class stand-in for a real-data analysis: its response table, class partitions and
class-to-profile coding are fixed, so the Q-reconstruction and back-solving steps can be
run without the survey itself. Every design is read from its directory under ``designs/``.
"""

from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from errors import ConfigError, DomainError, UsageError
from inference import load_coding, load_partitions
from models import (
    AttributeSpace,
    ClassPartition,
    ItemResponseModel,
    QMatrix,
    ResponseProbTable,
    load_model,
    load_q_matrix,
    table_for,
    true_partial_info,
)
from simulation import MixtureWeights, load_weights


@dataclass(frozen=True, eq=False)
class Design:
    """A true model: Q, class weights and response table, plus its structural form when known."""

    name: str
    family: str
    q: QMatrix
    weights: MixtureWeights
    table: ResponseProbTable
    space: AttributeSpace
    model: ItemResponseModel | None = None
    coding: dict[int, tuple[int, ...]] | None = None
    partitions: tuple[ClassPartition, ...] | None = None

    def true_partitions(self) -> list[ClassPartition]:
        if self.partitions is not None:
            return list(self.partitions)
        return [true_partial_info(self.table, j) for j in range(self.table.n_items)]

    def profiles(self) -> NDArray[np.int_]:
        """Attribute profile of every class of the table, in class order."""
        if self.coding is not None:
            return np.array([self.coding[c] for c in range(self.table.n_classes)], dtype=np.int_)
        return self.space.profiles()

    def class_names(self) -> list[str]:
        return ["".join(str(v) for v in row) for row in self.profiles()]


DESIGN_ROOT = Path(__file__).resolve().parent.parent / "designs"


def _load_success(path: Path) -> NDArray[np.float64]:
    """Items-by-classes success probabilities from a header-less CSV."""
    try:
        frame = pd.read_csv(path, header=None, comment="#", skipinitialspace=True)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ConfigError(f"Cannot read response table {path}: {e}") from e
    if frame.isna().any().any():
        raise ConfigError(f"Response table {path} has ragged or empty rows")
    return frame.to_numpy(dtype=float)


def _structural_design(name: str) -> Design:
    directory = DESIGN_ROOT / name
    return design_from_files(directory / "q.csv", directory / "model.json", directory / "pi.json")


def nida_design() -> Design:
    return _structural_design("nida")


def ncrum_design() -> Design:
    return _structural_design("ncrum")


def lcdm_design() -> Design:
    return _structural_design("lcdm")


def phobia_design() -> Design:
    """Five retained classes with a fixed coding; there is no structural model to load."""
    directory = DESIGN_ROOT / "phobia"
    q = load_q_matrix(directory / "q.csv")
    table = ResponseProbTable.from_success(_load_success(directory / "success.csv"), exact=False)
    if table.n_items != q.n_items:
        raise DomainError(f"{directory}: response table has {table.n_items} items, Q has {q.n_items}")
    weights = load_weights(directory / "pi.json")
    coding = load_coding(directory / "coding.json")
    return Design(
        name="phobia",
        family="NC-RUM",
        q=q,
        weights=weights,
        table=table,
        space=AttributeSpace.binary(q.n_attributes),
        coding=coding,
        partitions=tuple(load_partitions(directory / "partitions.json")),
    )


DESIGNS: dict[str, Callable[[], Design]] = {
    "nida": nida_design,
    "ncrum": ncrum_design,
    "lcdm": lcdm_design,
    "phobia": phobia_design,
}


def build_design(name: str) -> Design:
    try:
        return DESIGNS[name.lower()]()
    except KeyError:
        raise UsageError(f"Unknown design '{name}'; expected one of {', '.join(DESIGNS)}") from None


def design_from_files(
    q_path: str | Path, model_path: str | Path, pi_path: str | Path | None = None
) -> Design:
    """A design read from a Q-matrix CSV, a model document and (optionally) class weights.

    Without a weights file the classes are weighted uniformly. The design is named after
    the directory holding the model document.
    """
    q = load_q_matrix(q_path)
    model = load_model(model_path, q)
    space = AttributeSpace.binary(q.n_attributes)
    table = table_for(model, q, space)
    weights = load_weights(pi_path) if pi_path is not None else MixtureWeights.uniform(space.size)
    if weights.n_classes != table.n_classes:
        raise DomainError(f"{pi_path}: {weights.n_classes} class weights for {table.n_classes} classes")
    name = Path(model_path).resolve().parent.name or Path(model_path).stem
    return Design(name, model.family, q, weights, table, space, model)
