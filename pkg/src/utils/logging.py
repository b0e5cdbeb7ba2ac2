"""Logging configuration using structlog."""

import logging
import sys
from typing import Any

import numpy as np
import structlog

# Arrays longer than this are logged by shape only.
MAX_LOGGED_ARRAY = 16

_active: tuple[str, bool] | None = None


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        if value.size > MAX_LOGGED_ARRAY:
            return f"<array shape={value.shape} dtype={value.dtype}>"
        return value.tolist()
    return value


def numpy_to_builtin(
    logger: Any, method_name: str, event_dict: structlog.typing.EventDict
) -> structlog.typing.EventDict:
    """Solver context is full of numpy scalars; JSONRenderer needs plain values."""
    return {key: _plain(value) for key, value in event_dict.items()}


def setup_logging(level: str = "INFO", json_output: bool = False) -> None:
    """Configure structlog for the CLI and for sweep worker processes."""
    global _active

    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=getattr(logging, level.upper()),
        force=True,
    )

    processors: list[structlog.typing.Processor] = [
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.processors.TimeStamper(fmt="iso"),
        numpy_to_builtin,
    ]

    if json_output:
        processors += [
            structlog.processors.CallsiteParameterAdder(
                {structlog.processors.CallsiteParameter.PROCESS}
            ),
            structlog.processors.format_exc_info,
            structlog.processors.JSONRenderer(),
        ]
    else:
        processors.append(structlog.dev.ConsoleRenderer(colors=sys.stderr.isatty()))

    structlog.configure(
        processors=processors,
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )
    _active = (level, json_output)


def worker_logging_args() -> tuple[str, bool] | None:
    """Arguments that reproduce the parent's setup in a spawned worker, if any."""
    return _active
