"""Geometry of two-player zero-sum symmetric games."""

__version__ = "0.1.0"
