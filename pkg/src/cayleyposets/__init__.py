"""Construct, recognise and classify Cayley posets of semigroup acts."""

__version__ = "0.1.0"
