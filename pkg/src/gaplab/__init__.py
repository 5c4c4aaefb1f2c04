"""Finite-dimensional laboratory for the gap topology on closed operators."""

__version__ = "0.1.0"
