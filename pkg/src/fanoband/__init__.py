"""Hyperspectral band selection by mutual information and a Fano error score."""

__version__ = "0.1.0"
