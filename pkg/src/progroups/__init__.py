"""Finite quotients of pro-p groups and checks of their structural properties."""

__version__ = "0.1.0"
