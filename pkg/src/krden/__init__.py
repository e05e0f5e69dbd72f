"""Exact local densities and Kudla-Rapoport numbers for quadratic lattices over Z_p, p odd."""

__version__ = "0.1.0"
