"""Quantum resource estimation and VQE validation for peptide force-field work."""
__version__ = "0.1.0"
