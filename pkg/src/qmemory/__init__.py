"""Finite-temperature quantum memory simulation."""

__version__ = "0.1.0"
