"""Curved-spacetime Dirac operator construction with numeric cross-checks."""

__version__ = "0.1.0"
