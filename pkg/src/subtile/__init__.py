"""Substitution tilings, Perron-Frobenius frequency data and tile-count discrepancy experiments."""
__version__ = "0.1.0"
SCHEMA_VERSION = 1
