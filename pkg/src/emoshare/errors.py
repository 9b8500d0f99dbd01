"""Exception hierarchy shared across the toolkit.

The CLI maps these onto process exit codes: usage/validation problems
exit 2, data problems exit 3, numerical/solver problems exit 4.
"""

from __future__ import annotations


class EmoshareError(Exception):
    """Base class for all toolkit errors."""


class UsageError(EmoshareError):
    """Invalid configuration or command-line arguments."""


class DataError(EmoshareError):
    """Malformed, inconsistent, or misaligned input data."""


class SolverError(EmoshareError):
    """Numerical failure inside an optimizer (divergence, no valid config)."""
