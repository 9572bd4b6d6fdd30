"""Exact desk-scale checks for distance distributions of Reed-Muller codes."""

__version__ = "0.1.0"
