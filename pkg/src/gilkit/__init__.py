"""Parametric concrete and symbolic execution for the GIL goto language."""

__version__ = "0.1.0"
