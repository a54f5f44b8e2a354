"""Causal discovery between degradation paths."""

__version__ = "0.1.0"
