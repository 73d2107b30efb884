"""Solitary waves of perturbed cubic Schrodinger equations: profiles,
linearized spectra, virial diagnostics and split-step evolution."""

__version__ = "0.1.0"
