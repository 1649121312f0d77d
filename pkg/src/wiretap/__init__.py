"""Coset coding for wiretap channels."""

__version__ = "0.1.0"
