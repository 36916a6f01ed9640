"""Shared fixtures: the simulation designs and a small DINA model."""

import numpy as np
import pytest

from config import get_config
from harness import build_design
from models import DINA, AttributeSpace, QMatrix, ResponseSpec, build_prob_table
from simulation import MixtureWeights


@pytest.fixture(autouse=True)
def fresh_config(monkeypatch):
    """Settings are cached per process; every test starts from the defaults."""
    for name in ("DCMLAB_TRUNCATION_THRESHOLD", "DCMLAB_WORKERS", "DCMLAB_OUTPUT_DIR"):
        monkeypatch.delenv(name, raising=False)
    get_config.cache_clear()
    yield
    get_config.cache_clear()


@pytest.fixture
def nida():
    return build_design("nida")


@pytest.fixture
def ncrum():
    return build_design("ncrum")


@pytest.fixture
def lcdm():
    return build_design("lcdm")


@pytest.fixture
def dina_q():
    """Three copies of the 2-attribute identity plus one item needing both."""
    return QMatrix(np.array([[1, 0], [0, 1], [1, 0], [0, 1], [1, 0], [0, 1], [1, 1]]))


@pytest.fixture
def dina_model():
    return DINA(np.full(7, 0.1), np.full(7, 0.2))


@pytest.fixture
def dina_table(dina_q, dina_model):
    space = AttributeSpace.binary(2)
    return build_prob_table(dina_model, dina_q, space, ResponseSpec.binary(7))


@pytest.fixture
def uniform4():
    return MixtureWeights.uniform(4)
