"""Dynamical Lie algebras of quantum-control generators.

Exact Pauli-string algebra and dense-operator numerics for computing Lie
closures, composing direct sums through an ancilla, commutant-based
simulability indices, ideal decomposition with filtering, and a
product-formula error study on Ising chains.
"""

__version__ = "0.1.0"

from .closure import LieBasis, adjoint_matrices, contains, dense_closure, is_cyclic, pauli_closure
from .dense import DenseOperator, evolve, hs_inner, nullspace, operator_norm, spectral_projectors
from .errors import LieforgeError
from .generators import GeneratorSet, load_generators, parse_generator_text
from .pauli import PauliString, PauliSum, commutator, pauli_multiply, symplectic_commutes, to_dense

__all__ = [
    "DenseOperator",
    "GeneratorSet",
    "LieBasis",
    "LieforgeError",
    "PauliString",
    "PauliSum",
    "adjoint_matrices",
    "commutator",
    "contains",
    "dense_closure",
    "evolve",
    "hs_inner",
    "is_cyclic",
    "load_generators",
    "nullspace",
    "operator_norm",
    "parse_generator_text",
    "pauli_closure",
    "pauli_multiply",
    "spectral_projectors",
    "symplectic_commutes",
    "to_dense",
]
