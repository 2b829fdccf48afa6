"""Reconstruction of paths from their signatures."""
__version__ = "0.1.0"
