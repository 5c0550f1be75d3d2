"""Kac polynomials, BPS characters and Borcherds-Bozec algebras of quivers."""

__version__ = "0.1.0"
