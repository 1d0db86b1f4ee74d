"""Numerical explorer for elliptic problems with quadratic gradient growth."""

__version__ = "0.1.0"
