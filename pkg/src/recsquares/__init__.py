"""Squares in the binary recurrence sequences x_k + y_k sqrt(d) = alpha eps^(2k)."""

__version__ = "0.1.0"
