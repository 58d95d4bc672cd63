"""Spontaneous six-wave mixing in a five-level atomic ensemble: susceptibilities,
phase matching and triphoton temporal correlations."""

__version__ = "0.1.0"
