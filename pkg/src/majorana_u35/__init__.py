"""Computational verification of the Majorana representation of U3(5)."""

__version__ = "0.1.0"
