"""Structured logging for dcmlab using structlog.

Logs go to standard error; commands keep standard out for tables, verdicts and
reports. Event values may be numpy scalars or small arrays (ranks, class counts,
weights): they are converted to plain Python before rendering so JSON lines stay valid.
"""

import logging
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from typing import Any, TextIO

import numpy as np
import structlog

# Loggers that flood the console under `dcmlab serve` and the API tests.
NOISY_LOGGERS = ("uvicorn.access", "httpx", "httpcore")


def numpy_to_python(_logger: Any, _method: str, event_dict: dict[str, Any]) -> dict[str, Any]:
    """Processor turning numpy scalars and arrays in an event into builtins."""
    for key, value in event_dict.items():
        if isinstance(value, np.generic):
            event_dict[key] = value.item()
        elif isinstance(value, np.ndarray):
            event_dict[key] = value.tolist()
    return event_dict


def setup_logging(
    *, json_logs: bool = False, log_level: str = "INFO", stream: TextIO | None = None
) -> None:
    """Configure structured logging for the library and CLI.

    Args:
        json_logs: If True, output JSON lines (for batch runs). Otherwise, plain console output.
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR).
        stream: Destination stream, standard error by default.
    """
    shared_processors: list[structlog.types.Processor] = [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        numpy_to_python,
    ]

    if json_logs:
        shared_processors.append(structlog.processors.format_exc_info)
        renderer: structlog.types.Processor = structlog.processors.JSONRenderer()
    else:
        renderer = structlog.dev.ConsoleRenderer(colors=False)

    structlog.configure(
        processors=[
            *shared_processors,
            structlog.stdlib.ProcessorFormatter.wrap_for_formatter,
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )

    formatter = structlog.stdlib.ProcessorFormatter(
        foreign_pre_chain=shared_processors,
        processors=[
            structlog.stdlib.ProcessorFormatter.remove_processors_meta,
            renderer,
        ],
    )

    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(formatter)

    root_logger = logging.getLogger()
    root_logger.handlers.clear()
    root_logger.addHandler(handler)
    root_logger.setLevel(getattr(logging, log_level.upper()))

    for name in NOISY_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)


@contextmanager
def run_context(**fields: Any) -> Iterator[None]:
    """Bind fields (design, replicate, seed) to every event logged inside the block."""
    with structlog.contextvars.bound_contextvars(**fields):
        yield


def get_logger(name: str) -> structlog.stdlib.BoundLogger:
    """Get a structured logger instance.

    Args:
        name: Logger name (typically __name__).

    Returns:
        Configured structlog logger.
    """
    return structlog.get_logger(name)
