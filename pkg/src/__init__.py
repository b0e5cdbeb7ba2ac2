"""Collective Discord - pairwise quantum correlations in collective spin models."""

__version__ = "0.1.0"
