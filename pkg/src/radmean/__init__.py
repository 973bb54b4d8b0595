"""Radial mean bodies of planar convex polygons for p in (-1, 0)."""

__version__ = "0.1.0"
