"""Existence, diagnosis and construction of (A, Gamma) wavelet sets."""

__version__ = "0.1.0"
