"""Certified residual finiteness growth bounds for two-step nilpotent groups."""

__version__ = "0.1.0"
