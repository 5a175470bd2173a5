"""nestrix: exact-arithmetic chain-level topology engine."""

__version__ = "0.1.0"
