"""Exact VGIT stability toolkit for complete intersections and hyperplanes."""

__version__ = "0.1.0"
