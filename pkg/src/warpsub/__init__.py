"""Numerical geometry of warped-product Riemannian submersions."""
__version__ = "0.1.0"
