"""Exact verification of the conic-line arrangement cut out by the 21
reducible polars of Klein's quartic."""

__version__ = "0.1.0"
