"""Phoneme representation and classification benchmark toolkit."""

__version__ = "0.1.0"
