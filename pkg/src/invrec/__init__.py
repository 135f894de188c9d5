"""Spectral invariants and inverse reconstruction for 26-mode periodic potentials."""
from .errors import InvrecError
from .invariants import InvariantSet, compute_invariants
from .kernels import BACKEND
from .lattice import LatticeBasis, default_basis
from .potential import PotentialCoefficients, random_generic
from .reconstruct import compare_mod_gauge, reconstruct

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "InvariantSet",
    "InvrecError",
    "LatticeBasis",
    "PotentialCoefficients",
    "compare_mod_gauge",
    "compute_invariants",
    "default_basis",
    "random_generic",
    "reconstruct",
]
