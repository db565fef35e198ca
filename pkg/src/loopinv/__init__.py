"""Polynomial equation loop invariant generation from program samples."""

__version__ = "0.1.0"
