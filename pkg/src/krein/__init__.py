"""Maximal nonnegative invariant subspaces of J-dissipative block operators.

Submodules: ``core`` (Krein structure, block operators, dissipativity),
``transfer`` (Schur complement family), ``riccati`` (angle-operator
solvers and restriction), ``semigroup`` (resolvent diagnostics),
``family`` (generators and Galerkin trends), ``io`` and ``cli``.
"""

__version__ = "0.1.0"

from .core import BlockOperator, KreinStructure, check_dissipativity, j_adjoint, j_inner
from .transfer import eval_transfer
from .riccati import restriction, riccati_residuals, solve_angle
from .semigroup import classify

__all__ = [
    "BlockOperator",
    "KreinStructure",
    "check_dissipativity",
    "classify",
    "eval_transfer",
    "j_adjoint",
    "j_inner",
    "restriction",
    "riccati_residuals",
    "solve_angle",
    "__version__",
]
