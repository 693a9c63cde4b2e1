"""Exact engine for representation spaces of graded maximal Cohen-Macaulay
modules over a prime field."""

__version__ = "0.1.0"
