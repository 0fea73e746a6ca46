"""Port-Hamiltonian vibrating-string workbench."""

__version__ = "0.1.0"
