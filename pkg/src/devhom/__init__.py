"""Homological deviation of finite structures from theories."""
__version__ = "0.1.0"
