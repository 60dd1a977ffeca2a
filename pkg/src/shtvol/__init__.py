"""Exact arithmetic for volumes of shtuka moduli, their trace oracle and the phantom tautological ring."""

__version__ = "0.1.0"
