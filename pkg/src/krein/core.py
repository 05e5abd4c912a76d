"""Krein-space primitives: fundamental symmetry, block operators, dissipativity.

Inner products are linear in the first slot and conjugate-linear in the
second, ``(x, y) = sum(x * conj(y))``.  All matrix norms are spectral norms.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatchError, InvalidParamsError

#: sigma_min(A22 - mu) must exceed this times max(1, ||A22||).
RESOLVENT_TOL = 1e-12
#: lambda_max of the Hermitian part of JA may exceed zero by this times max(1, ||A||).
DISSIPATIVITY_TOL = 1e-10


def norm2(M) -> float:
    """Spectral norm; 0 for empty matrices."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    if M.ndim == 1:
        return float(np.linalg.norm(M))
    return float(np.linalg.norm(M, 2))


def sigma_min(M) -> float:
    M = np.asarray(M)
    if M.size == 0:
        return np.inf
    return float(np.linalg.svd(M, compute_uv=False)[-1])


def hermitian_part(M) -> np.ndarray:
    M = np.asarray(M)
    return (M + M.conj().T) / 2


def _frozen(M, shape, name) -> np.ndarray:
    arr = np.array(M, dtype=complex, ndmin=2, copy=True)
    if arr.shape != shape:
        raise DimensionMismatchError(f"{name} has shape {arr.shape}, expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParamsError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class KreinStructure:
    """Signature ``(n_plus, n_minus)`` of the fundamental symmetry ``J``."""

    n_plus: int
    n_minus: int

    def __post_init__(self):
        for name in ("n_plus", "n_minus"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise InvalidParamsError(f"{name} must be a positive integer, got {v!r}")

    @property
    def n(self) -> int:
        return self.n_plus + self.n_minus

    @property
    def kappa(self) -> int:
        return min(self.n_plus, self.n_minus)

    @property
    def signs(self) -> np.ndarray:
        return np.concatenate([np.ones(self.n_plus), -np.ones(self.n_minus)])

    @property
    def J(self) -> np.ndarray:
        return np.diag(self.signs).astype(complex)

    @property
    def P_plus(self) -> np.ndarray:
        return np.diag(np.concatenate([np.ones(self.n_plus), np.zeros(self.n_minus)])).astype(complex)

    @property
    def P_minus(self) -> np.ndarray:
        return np.diag(np.concatenate([np.zeros(self.n_plus), np.ones(self.n_minus)])).astype(complex)


@dataclass(frozen=True, eq=False)
class BlockOperator:
    """``A = [[A11, A12], [A21, A22]]`` with respect to ``H = H+ (+) H-``.

    Blocks are stored as read-only complex arrays.
    """

    structure: KreinStructure
    A11: np.ndarray
    A12: np.ndarray
    A21: np.ndarray
    A22: np.ndarray

    def __post_init__(self):
        p, m = self.structure.n_plus, self.structure.n_minus
        object.__setattr__(self, "A11", _frozen(self.A11, (p, p), "A11"))
        object.__setattr__(self, "A12", _frozen(self.A12, (p, m), "A12"))
        object.__setattr__(self, "A21", _frozen(self.A21, (m, p), "A21"))
        object.__setattr__(self, "A22", _frozen(self.A22, (m, m), "A22"))

    @classmethod
    def from_blocks(cls, A11, A12, A21, A22) -> "BlockOperator":
        A11 = np.array(A11, dtype=complex, ndmin=2)
        A22 = np.array(A22, dtype=complex, ndmin=2)
        st = KreinStructure(A11.shape[0], A22.shape[0])
        return cls(st, A11, A12, A21, A22)

    @classmethod
    def from_matrix(cls, M, n_plus: int) -> "BlockOperator":
        M = np.asarray(M, dtype=complex)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DimensionMismatchError(f"expected a square matrix, got shape {M.shape}")
        p = n_plus
        st = KreinStructure(p, M.shape[0] - p)
        return cls(st, M[:p, :p], M[:p, p:], M[p:, :p], M[p:, p:])

    @property
    def n_plus(self) -> int:
        return self.structure.n_plus

    @property
    def n_minus(self) -> int:
        return self.structure.n_minus

    @cached_property
    def matrix(self) -> np.ndarray:
        M = np.block([[self.A11, self.A12], [self.A21, self.A22]])
        M.setflags(write=False)
        return M

    @cached_property
    def norm(self) -> float:
        return norm2(self.matrix)

    @property
    def scale(self) -> float:
        return max(1.0, self.norm)

    def replace(self, **blocks) -> "BlockOperator":
        current = {k: getattr(self, k) for k in ("A11", "A12", "A21", "A22")}
        current.update(blocks)
        return BlockOperator.from_blocks(**current)

    def __eq__(self, other):
        if not isinstance(other, BlockOperator):
            return NotImplemented
        return self.structure == other.structure and np.array_equal(self.matrix, other.matrix)

    __hash__ = None


@dataclass(frozen=True)
class DissipativityVerdict:
    j_dissipative: bool
    uniform_margin: float
    max_real_numeric: float


def j_inner(structure: KreinStructure, x, y) -> complex:
    """Indefinite product ``[x, y] = (Jx, y)``."""
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    if x.shape != (structure.n,) or y.shape != (structure.n,):
        raise DimensionMismatchError(f"vectors must have length {structure.n}, got {x.shape} and {y.shape}")
    return complex(np.sum(structure.signs * x * y.conj()))


def j_adjoint(A: BlockOperator) -> BlockOperator:
    """The J-adjoint ``J A* J``.

    Blockwise this is ``[[A11*, -A21*], [-A12*, A22*]]``, which involves only
    conjugation and sign flips, so applying it twice returns ``A`` exactly.
    """
    return BlockOperator(
        A.structure,
        A.A11.conj().T,
        -A.A21.conj().T,
        -A.A12.conj().T,
        A.A22.conj().T,
    )


def check_dissipativity(A: BlockOperator, tol: float | None = None) -> DissipativityVerdict:
    """Test ``Re [Ax, x] <= 0`` through the Hermitian part of ``JA``."""
    JA = A.structure.signs[:, None] * A.matrix
    lam_max = float(np.linalg.eigvalsh(hermitian_part(JA))[-1])
    if tol is None:
        tol = DISSIPATIVITY_TOL * A.scale
    return DissipativityVerdict(
        j_dissipative=lam_max <= tol,
        uniform_margin=max(0.0, -lam_max),
        max_real_numeric=lam_max,
    )


def factorization_residual(A: BlockOperator, mu) -> float:
    """Relative defect of the two block factorizations through ``S, F, G``.

    Checks ``A = mu + [[1, G], [0, 1]] diag(S - mu, A22 - mu) [[1, 0], [F, 1]]``
    and ``JA + mu = J [[1, G], [0, 1]] diag(S + mu, A22 - mu) [[1, 0], [F, 1]]``;
    returns the larger of the two residuals divided by ``max(1, ||A||)``.
    """
    from .transfer import eval_transfer

    ev = eval_transfer(A, mu)
    p, m = A.n_plus, A.n_minus
    Ip, Im = np.eye(p), np.eye(m)
    upper = np.block([[Ip, ev.G], [np.zeros((m, p)), Im]])
    lower = np.block([[Ip, np.zeros((p, m))], [ev.F, Im]])
    n = A.structure.n
    M22 = A.A22 - mu * Im

    mid = np.block([[ev.S - mu * Ip, np.zeros((p, m))], [np.zeros((m, p)), M22]])
    rebuilt = mu * np.eye(n) + upper @ mid @ lower
    res_closure = norm2(A.matrix - rebuilt)

    mid = np.block([[ev.S + mu * Ip, np.zeros((p, m))], [np.zeros((m, p)), M22]])
    J = A.structure.signs[:, None]
    lhs = J * A.matrix + mu * np.eye(n)
    res_j = norm2(lhs - J * (upper @ mid @ lower))
    return max(res_closure, res_j) / A.scale


def quadratic_identity_residual(A: BlockOperator, mu, x_plus) -> float:
    """Defect of ``(Sx, x) = (JA (x, -Fx), (x, -Fx)) + mu (Fx, Fx)``."""
    from .transfer import eval_transfer

    x = np.asarray(x_plus, dtype=complex).ravel()
    if x.shape != (A.n_plus,):
        raise DimensionMismatchError(f"x_plus must have length {A.n_plus}, got {x.shape}")
    ev = eval_transfer(A, mu)
    Fx = ev.F @ x
    z = np.concatenate([x, -Fx])
    JAz = A.structure.signs * (A.matrix @ z)
    lhs = np.vdot(x, ev.S @ x)
    rhs = np.vdot(z, JAz) + mu * np.vdot(Fx, Fx)
    return float(abs(lhs - rhs)) / max(1.0, float(np.vdot(x, x).real))
