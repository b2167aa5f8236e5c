"""Uncertainty quantification with mixed binomial random measures."""

__version__ = "0.1.0"
