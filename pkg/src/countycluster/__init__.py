"""County-level clustering analytics engine."""

__version__ = "0.1.0"
