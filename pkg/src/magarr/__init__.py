"""Exact magnitude and magnitude homology of real central arrangements."""

__version__ = "0.1.0"
