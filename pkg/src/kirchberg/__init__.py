"""Hybrid graph models of Kirchberg algebras."""

__version__ = "0.1.0"
