"""Mod-2 cohomology of planar polygon spaces and topological-complexity certificates."""

__version__ = "0.1.0"
