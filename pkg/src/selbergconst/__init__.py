"""Validated constants for a logarithmic Selberg sieve."""

__version__ = "0.1.0"
