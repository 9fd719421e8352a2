"""Circular-arc Helly toolkit: conformal models, PQM-trees, clique typing,
the Helly-cliques solver, and the polynomial kernel."""

__version__ = "0.1.0"
