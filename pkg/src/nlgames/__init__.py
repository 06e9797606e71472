"""Bayesian games with no-signaling and quantum advice."""

__version__ = "0.1.0"
