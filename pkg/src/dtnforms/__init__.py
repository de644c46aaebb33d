"""Exact and numerical spectral tools for the Dirichlet-to-Neumann operator on forms."""

__version__ = "0.1.0"
