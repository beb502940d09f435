"""Spectral certificates for vanishing of cohomology with twisted coefficients."""

__version__ = "0.1.0"
