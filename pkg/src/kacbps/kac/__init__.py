"""Kac polynomials: Hua-type generating functions and finite-field counting."""
