"""Transfer function (Schur complement) and its companions.

For ``mu`` in the resolvent set of ``A22``::

    F(mu) = (A22 - mu)^-1 A21      G(mu) = A12 (A22 - mu)^-1
    R(mu) = A12 F(mu)              S(mu) = A11 - R(mu)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .core import RESOLVENT_TOL, BlockOperator, hermitian_part, norm2, sigma_min
from .errors import BranchCutError, InvalidParamsError, MuInSpectrumError, NotDiagonalizableError

#: Largest eigenvector-matrix condition number accepted by ``fractional_power``.
MAX_EIGVEC_COND = 1e8


@dataclass(frozen=True, eq=False)
class TransferEval:
    mu: complex
    S: np.ndarray
    F: np.ndarray
    G: np.ndarray
    R: np.ndarray


@dataclass(frozen=True)
class EnvelopeSample:
    mu: complex
    g_norm: float
    f_norm: float
    r_norm: float
    s_norm: float
    error: str | None = None


@dataclass(frozen=True)
class EnvelopeCurve:
    samples: list[EnvelopeSample] = field(default_factory=list)

    def valid(self) -> list[EnvelopeSample]:
        return [s for s in self.samples if s.error is None]


def check_resolvent(A22, mu) -> None:
    """Raise ``MuInSpectrumError`` unless ``sigma_min(A22 - mu)`` clears the scaled tolerance."""
    A22 = np.asarray(A22)
    smin = sigma_min(A22 - mu * np.eye(A22.shape[0]))
    if not smin > RESOLVENT_TOL * max(1.0, norm2(A22)):
        raise MuInSpectrumError(mu, smin)


def eval_transfer(A: BlockOperator, mu) -> TransferEval:
    mu = complex(mu)
    check_resolvent(A.A22, mu)
    lu = linalg.lu_factor(A.A22 - mu * np.eye(A.n_minus), check_finite=False)
    F = linalg.lu_solve(lu, A.A21, check_finite=False)
    # G (A22 - mu) = A12  <=>  (A22 - mu)^T G^T = A12^T
    G = linalg.lu_solve(lu, A.A12.T, trans=1, check_finite=False).T
    R = A.A12 @ F
    S = A.A11 - R
    return TransferEval(mu=mu, S=S, F=F, G=G, R=R)


def fractional_power(M, alpha: float) -> np.ndarray:
    """Principal power ``M**alpha`` of a diagonalizable matrix with spectrum in ``Re > 0``.

    ``alpha`` equal to 0 or 1 returns ``I`` or ``M`` exactly. Hermitian input
    goes through ``eigh``; anything else through ``eig`` with a check on the
    condition number of the eigenvector matrix.
    """
    M = np.asarray(M, dtype=complex)
    if not 0.0 <= alpha <= 1.0:
        raise InvalidParamsError(f"alpha must lie in [0, 1], got {alpha}")
    n = M.shape[0]
    if n == 0:
        return M.copy()
    if np.allclose(M, M.conj().T, rtol=0, atol=1e-14 * max(1.0, norm2(M))):
        w, V = np.linalg.eigh(hermitian_part(M))
        if np.any(w <= 0):
            raise BranchCutError(f"eigenvalue {w.min()!r} is not in Re > 0")
        if alpha == 0:
            return np.eye(n, dtype=complex)
        if alpha == 1:
            return M.copy()
        return (V * w**alpha) @ V.conj().T
    w, V = np.linalg.eig(M)
    if np.any(w.real <= 0):
        bad = w[np.argmin(w.real)]
        raise BranchCutError(f"eigenvalue {bad!r} is not in Re > 0")
    cond = np.linalg.cond(V)
    if not cond <= MAX_EIGVEC_COND:
        raise NotDiagonalizableError(f"eigenvector matrix condition {cond:.3e} exceeds {MAX_EIGVEC_COND:.0e}")
    if alpha == 0:
        return np.eye(n, dtype=complex)
    if alpha == 1:
        return M.copy()
    return np.linalg.solve(V.T, (V * w**alpha).T).T


def pair_norms(A: BlockOperator, alpha: float) -> tuple[float, float]:
    """Norms of the pair ``A12 P^a`` and ``P^(1-a) A21`` built on ``P = -A22 - 1``.

    When ``-A22 - 1`` has its spectrum in ``Re > 0`` its principal powers are
    used directly.  In the dissipative orientation (``A22`` accretive, so
    ``-A22 - 1`` has spectrum in ``Re <= -1``) the powers are taken on the
    positive operator ``A22 + 1`` with negated exponents,
    ``(||A12 (A22+1)^-a||, ||(A22+1)^-(1-a) A21||``; that is the pairing for
    which ``R(mu) - R(-1) = (mu+1) A12 (A22-mu)^-1 (A22+1)^-1 A21`` splits into
    two bounded outer factors.
    """
    m = A.n_minus
    base = -A.A22 - np.eye(m)
    try:
        left = fractional_power(base, alpha)
        right = fractional_power(base, 1.0 - alpha)
        return norm2(A.A12 @ left), norm2(right @ A.A21)
    except BranchCutError:
        pos = A.A22 + np.eye(m)
        try:
            left = fractional_power(pos, alpha)
            right = fractional_power(pos, 1.0 - alpha)
        except BranchCutError:
            raise BranchCutError("neither -A22-1 nor A22+1 has spectrum in Re > 0") from None
        return norm2(np.linalg.solve(left.T, A.A12.T).T), norm2(np.linalg.solve(right, A.A21))


def envelope(A: BlockOperator, mu_samples) -> EnvelopeCurve:
    """Norms of ``G, F, R, S`` at each sample; inadmissible samples are flagged, not fatal."""
    out = []
    for mu in mu_samples:
        try:
            ev = eval_transfer(A, mu)
        except MuInSpectrumError as exc:
            nan = float("nan")
            out.append(EnvelopeSample(complex(mu), nan, nan, nan, nan, error=exc.code))
            continue
        out.append(EnvelopeSample(ev.mu, norm2(ev.G), norm2(ev.F), norm2(ev.R), norm2(ev.S)))
    return EnvelopeCurve(out)


def default_mu_samples(A: BlockOperator, kmax: int = 12) -> list[complex]:
    """Ray ``-2^k (1 + ||A||)`` with vertical offsets ``+-i 2^k`` for the sector probe."""
    base = 1.0 + A.norm
    mus = []
    for k in range(kmax + 1):
        r = -(2.0**k) * base
        mus.extend([complex(r), complex(r, 2.0**k), complex(r, -(2.0**k))])
    return mus
