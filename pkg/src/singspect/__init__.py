"""Spectral invariants of quasi-homogeneous polynomial singularities."""

__version__ = "0.1.0"
