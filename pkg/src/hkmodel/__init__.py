"""Exact rational models of the cohomology algebra generated by H^2 of a hyperkähler manifold."""

__version__ = "0.1.0"
