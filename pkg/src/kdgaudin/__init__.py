"""Multinomial representation of the Kohno-Drinfeld algebra, closed-form
Gaudin diagonalisation and multivariate Krawtchouk polynomials."""

__version__ = "0.1.0"

from .errors import (
    DegenerateParameterError,
    DomainError,
    InvalidKappaError,
    KDError,
    LatticeSizeError,
    NonOrthogonalColumnsError,
    NoRealSolutionError,
    SingularAnsatzError,
)
from .gaudin import GaudinModel, find_beta, poly_R, solve
from .kappa import KrawtchoukParam, complete_from_U, involution, random_kappa, validate
from .krawtchouk import BasisTable, basis_table, eval_poly, norm_sq
from .lattice import LatticeGrid, ModelParams, enumerate_lattice, weight_vector
from .operators import build_all_L, build_gaudin, build_hamiltonian, build_L

__all__ = [
    "BasisTable",
    "DegenerateParameterError",
    "DomainError",
    "GaudinModel",
    "InvalidKappaError",
    "KDError",
    "KrawtchoukParam",
    "LatticeGrid",
    "LatticeSizeError",
    "ModelParams",
    "NoRealSolutionError",
    "NonOrthogonalColumnsError",
    "SingularAnsatzError",
    "basis_table",
    "build_L",
    "build_all_L",
    "build_gaudin",
    "build_hamiltonian",
    "complete_from_U",
    "enumerate_lattice",
    "eval_poly",
    "find_beta",
    "involution",
    "norm_sq",
    "poly_R",
    "random_kappa",
    "solve",
    "validate",
    "weight_vector",
]
