"""Exact Koszul-cohomology Betti tables and syzygy-property calculators."""

__version__ = "0.1.0"
