"""Utility modules."""

from .logging import numpy_to_builtin, setup_logging, worker_logging_args

__all__ = ["numpy_to_builtin", "setup_logging", "worker_logging_args"]
