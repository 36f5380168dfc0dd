"""Dequantization of real polynomials and the simplest patchworking of plane curves."""

__version__ = "0.1.0"
