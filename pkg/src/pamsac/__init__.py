"""Exact multiwinner approval elections."""

__version__ = "0.1.0"
