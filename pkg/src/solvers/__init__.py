"""Finite-N ground-state solvers for the Dicke and LMG models."""

from .base import BaseSolver, Eigenpair
from .dicke import DickeSolver
from .fock import displaced_fock_matrix, displaced_fock_overlap
from .lmg import LmgSolver
from .spin import SpinMatrices, half_bandwidth, magnetic_numbers, spin_matrices

__all__ = [
    "BaseSolver",
    "DickeSolver",
    "Eigenpair",
    "LmgSolver",
    "SpinMatrices",
    "displaced_fock_matrix",
    "displaced_fock_overlap",
    "half_bandwidth",
    "magnetic_numbers",
    "spin_matrices",
]
