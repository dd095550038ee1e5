"""Hermite variations of fractional Brownian motion: sampling, limit laws and tail series."""

__version__ = "0.1.0"
