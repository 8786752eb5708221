"""Desk-scale verification of m-isometry and cogenerator identities and of weighted Dirichlet space models."""

__version__ = "0.1.0"
