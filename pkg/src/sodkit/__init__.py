"""Exact and numerical checks for decoupling-type inequalities on planar curves."""

__version__ = "0.1.0"
