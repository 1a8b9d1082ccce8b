"""Numerical verification of PMCV hypersurfaces in pseudo-Riemannian space forms."""

__version__ = "0.1.0"
