"""Exact normalization and reduction of the KS-regularized Stark Hamiltonian."""

__version__ = "0.1.0"
