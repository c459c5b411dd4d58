"""Exact computations with bound quiver algebras, homotopy categories and n-angles."""

__version__ = "0.1.0"
