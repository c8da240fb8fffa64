"""Exact local computations around Eisenstein-series congruences."""

__version__ = "0.1.0"
