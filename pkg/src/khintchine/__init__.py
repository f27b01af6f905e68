"""Computable measure theory for the Khintchine-Groshev theorem."""

__version__ = "0.1.0"
