"""Trotterized counterdiabatic annealing with greedy CD-sign optimization."""

__version__ = "0.1.0"
