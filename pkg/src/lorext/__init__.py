"""Weighted Lorentz and grand Lorentz norms, Muckenhoupt weights and extrapolation constants on finite quasi-metric measure spaces."""

__version__ = "0.1.0"
