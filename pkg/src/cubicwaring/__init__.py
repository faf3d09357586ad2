"""Exact Waring rank engine for reducible cubic forms."""

__version__ = "0.1.0"
