"""Exact algebra toolkit for Novikov superalgebras, Gel'fand-Dorfman bialgebras
and quadratic conformal superalgebras."""

from ._accel import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
