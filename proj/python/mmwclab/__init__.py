"""Minimum mean-weight cycle laboratory: solvers, mean-field instances,
range-restricted walk estimators, and eigenvalue numerics."""

from ._core import *  # noqa: F401,F403
from ._core import spectral  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
