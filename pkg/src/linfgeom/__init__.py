"""Exact computations for geometric L-infinity deformations of Lie algebroids."""

__version__ = "0.1.0"
