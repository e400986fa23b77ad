"""Probabilistic CCS, the probabilistic pi-calculus, a translation between them
and bounded checkers for operational correspondence and bisimulation."""

__version__ = "0.1.0"
