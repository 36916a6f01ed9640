"""Tests for the structlog setup."""

import io
import json
import logging

import numpy as np
import pytest

from logging_config import NOISY_LOGGERS, get_logger, numpy_to_python, run_context, setup_logging


@pytest.fixture
def restore_root_logger():
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def test_numpy_values_become_builtins():
    event = numpy_to_python(None, "info", {"rank": np.int64(8), "pi": np.array([0.5, 0.5]), "name": "nida"})

    assert event == {"rank": 8, "pi": [0.5, 0.5], "name": "nida"}
    assert type(event["rank"]) is int


def test_json_lines_carry_context_and_numpy_values(restore_root_logger):
    stream = io.StringIO()
    setup_logging(json_logs=True, log_level="INFO", stream=stream)

    with run_context(design="nida", replicate=3):
        get_logger("tests.logging").info("replicate_done", retained=np.int64(8))
    get_logger("tests.logging").info("outside")

    first, second = (json.loads(line) for line in stream.getvalue().splitlines())
    assert first["event"] == "replicate_done"
    assert first["design"] == "nida"
    assert first["replicate"] == 3
    assert first["retained"] == 8
    assert first["level"] == "info"
    assert "replicate" not in second


def test_level_and_noisy_loggers(restore_root_logger):
    stream = io.StringIO()
    setup_logging(log_level="warning", stream=stream)

    get_logger("tests.logging").info("hidden")
    get_logger("tests.logging").warning("shown", items=13)

    output = stream.getvalue()
    assert "hidden" not in output
    assert "shown" in output
    assert logging.getLogger().level == logging.WARNING
    for name in NOISY_LOGGERS:
        assert logging.getLogger(name).level == logging.WARNING
