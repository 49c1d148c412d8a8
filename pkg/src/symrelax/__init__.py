"""Symmetry reduction for moment and sum-of-squares relaxations."""

__version__ = "0.1.0"
