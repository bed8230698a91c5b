"""Desk-scale laboratory for Reed-Muller codes, successive layer
entropies, and entropic sumset machinery over F2."""

__version__ = "0.1.0"
