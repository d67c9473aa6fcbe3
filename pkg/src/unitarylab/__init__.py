"""Structured unitary matrices: complex Hadamard matrices, restricted defects,
2-unitary (AME) diagnostics and excess-based Bell inequality analysis."""

__version__ = "0.1.0"
