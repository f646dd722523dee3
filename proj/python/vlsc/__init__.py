"""Exact finite-blocklength analysis of variable-length source codes."""

from ._core import *  # noqa: F401,F403
from ._core import ResourceLimitError, ValidationError

__all__ = [name for name in dir() if not name.startswith("_")]
