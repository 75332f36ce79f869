"""Hybrid classical/neural solvers for ODEs and semi-discretised PDEs."""

__version__ = "0.1.0"
