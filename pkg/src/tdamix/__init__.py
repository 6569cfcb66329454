"""Persistence landscape densities from SIR landmark samples."""

__version__ = "0.1.0"
