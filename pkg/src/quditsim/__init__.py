"""Qudit quantum circuit simulator."""

__version__ = "0.1.0"
