"""Exact local Euler–Maclaurin expansions over rational polyhedra."""

__version__ = "0.1.0"
