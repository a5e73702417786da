"""Exact verification engine for a closed G2 nilmanifold construction."""

__version__ = "0.1.0"
