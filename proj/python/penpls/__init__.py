"""Penalized partial least squares for additive B-spline models."""

from ._penpls import *  # noqa: F401,F403
from ._penpls import __doc__  # noqa: F401

__version__ = "0.1.0"
