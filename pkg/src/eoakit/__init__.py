"""Entanglement of assistance and collaboration for tripartite states."""

__version__ = "0.1.0"
