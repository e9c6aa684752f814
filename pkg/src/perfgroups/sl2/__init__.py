"""Representation theory of SL2 and of its perfection in characteristic p."""

from . import classical, perfect

__all__ = ["classical", "perfect"]
