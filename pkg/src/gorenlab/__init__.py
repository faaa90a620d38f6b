"""Exact homological algebra over finite-dimensional commutative algebras."""
__version__ = "0.1.0"
