"""Depleted-pump pair production: amplitude dynamics, closed forms,
entanglement and channel-capacity observables."""

__version__ = "0.1.0"
