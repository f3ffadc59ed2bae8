"""Minimal disturbance measurement on single qubits: exact channel, bounds, and optics simulation."""

__version__ = "0.1.0"
