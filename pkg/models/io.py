"""Q-matrix CSV files and model parameter documents.

A model parameter document is a JSON object tagged by ``family``:

    {"family": "DINA", "slip": [...J], "guess": [...J]}
    {"family": "DINO", "slip": [...J], "guess": [...J]}
    {"family": "NIDA", "slip": [...K] or [[...K] x J], "guess": same shape}
    {"family": "NC-RUM", "phi": [...J], "r": [[...K] x J]}          # null where q_jk = 0
    {"family": "C-RUM", "intercept": [...J], "slopes": [[...K] x J]}
    {"family": "LCDM", "eta": [...J], "effects": [{"1": 4.0}, {"1": 2, "2": 2, "1,2": 0}, ...]}
    {"family": "saturated", "probs": [[[p^1..p^k] x M] x J]}

Attribute indices in LCDM effect keys are 1-based and comma-separated.
"""

import json
from pathlib import Path
from typing import Annotated, Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, TypeAdapter, ValidationError

from errors import ConfigError

from .base import ItemResponseModel
from .families import CRUM, DINA, DINO, LCDM, NIDA, ReducedNCRUM, Saturated
from .space import QMatrix


def load_q_matrix(path: str | Path) -> QMatrix:
    """Read a header-less CSV of 0/1 entries, one row per item."""
    try:
        frame = pd.read_csv(path, header=None, comment="#", skipinitialspace=True)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ConfigError(f"Cannot read Q-matrix {path}: {e}") from e
    if frame.isna().any().any():
        bad = [int(i) + 1 for i in np.flatnonzero(frame.isna().any(axis=1).to_numpy())]
        raise ConfigError(f"Q-matrix {path}: ragged or empty entries on rows {bad}")
    return QMatrix(frame.to_numpy())


def write_q_matrix(q: QMatrix, path: str | Path) -> None:
    pd.DataFrame(q.entries).to_csv(path, header=False, index=False)


def _matrix(values: list[list[float | None]]) -> np.ndarray:
    return np.array([[np.nan if v is None else v for v in row] for row in values], dtype=float)


class _SlipGuessDocument(BaseModel):
    slip: list[float]
    guess: list[float]


class DINADocument(_SlipGuessDocument):
    family: Literal["DINA"]

    def to_model(self, q: QMatrix) -> ItemResponseModel:
        return DINA(np.array(self.slip), np.array(self.guess))


class DINODocument(_SlipGuessDocument):
    family: Literal["DINO"]

    def to_model(self, q: QMatrix) -> ItemResponseModel:
        return DINO(np.array(self.slip), np.array(self.guess))


class NIDADocument(BaseModel):
    family: Literal["NIDA"]
    slip: list[float] | list[list[float | None]]
    guess: list[float] | list[list[float | None]]

    def to_model(self, q: QMatrix) -> ItemResponseModel:
        if self.slip and isinstance(self.slip[0], list):
            return NIDA(_matrix(self.slip), _matrix(self.guess))
        return NIDA.per_attribute(self.slip, self.guess, q.n_items)


class NCRUMDocument(BaseModel):
    family: Literal["NC-RUM"]
    phi: list[float]
    r: list[list[float | None]]

    def to_model(self, q: QMatrix) -> ItemResponseModel:
        return ReducedNCRUM(np.array(self.phi), _matrix(self.r))


class CRUMDocument(BaseModel):
    family: Literal["C-RUM"]
    intercept: list[float]
    slopes: list[list[float | None]]

    def to_model(self, q: QMatrix) -> ItemResponseModel:
        return CRUM(np.array(self.intercept), _matrix(self.slopes))


class LCDMDocument(BaseModel):
    family: Literal["LCDM"]
    eta: list[float]
    effects: list[dict[str, float]]

    def to_model(self, q: QMatrix) -> ItemResponseModel:
        effects = []
        for j, item in enumerate(self.effects):
            terms = {}
            for key, value in item.items():
                try:
                    term = tuple(int(k) - 1 for k in key.split(","))
                except ValueError as e:
                    raise ConfigError(f"Item {j + 1}: bad LCDM effect key '{key}'") from e
                terms[term] = value
            effects.append(terms)
        return LCDM(np.array(self.eta), tuple(effects))


class SaturatedDocument(BaseModel):
    family: Literal["saturated"]
    probs: list[list[list[float]]]

    def to_model(self, q: QMatrix) -> ItemResponseModel:
        return Saturated(tuple(np.array(p, dtype=float) for p in self.probs))


ModelDocument = Annotated[
    DINADocument
    | DINODocument
    | NIDADocument
    | NCRUMDocument
    | CRUMDocument
    | LCDMDocument
    | SaturatedDocument,
    Field(discriminator="family"),
]

_adapter: TypeAdapter[ModelDocument] = TypeAdapter(ModelDocument)


def parse_model(document: dict, q: QMatrix) -> ItemResponseModel:
    """Validate a model parameter document against `q` and build the model."""
    try:
        parsed = _adapter.validate_python(document)
    except ValidationError as e:
        raise ConfigError(f"Invalid model document: {e}") from e
    model = parsed.to_model(q)
    model.validate(q)
    return model


def load_model(path: str | Path, q: QMatrix) -> ItemResponseModel:
    try:
        document = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read model document {path}: {e}") from e
    return parse_model(document, q)


def dump_model(model: ItemResponseModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_document(), indent=2) + "\n")
