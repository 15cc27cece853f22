"""Stochastic domination, dilution and perfect sampling on finite graphs."""

from ._core import *  # noqa: F401,F403
from ._core import ArgumentError, ConfigError, Error, Graph, Measure, RegimeError, SizeError

STAR = 2

__all__ = [name for name in dir() if not name.startswith("_")]
