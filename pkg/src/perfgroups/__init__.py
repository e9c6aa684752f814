"""Root data over Z[1/p] and the representation theory of perfected SL2."""

__version__ = "0.1.0"
