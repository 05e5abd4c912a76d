"""Angle operators of maximal nonnegative invariant subspaces.

A maximal nonnegative subspace is the graph ``{(x, Kx)}`` of a contraction
``K: H+ -> H-``.  It is invariant under ``A`` exactly when ``K`` solves

    A21 + A22 K - K A11 - K A12 K = 0,

or equivalently, for any admissible ``mu``, the modified form

    (1 - KG)(A22 - mu)(F + K) = K (S - mu).

Three solvers are provided: an ordered Schur factorization of the full
matrix, the fixed-point iteration on the modified equation, and a
continuation through the strictly dissipative family ``A - eps P+``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.linalg import lapack

from .core import BlockOperator, check_dissipativity, norm2, sigma_min
from .errors import (
    CoordinateDegenerateError,
    ContractionViolatedError,
    GapTooSmallError,
    GNormTooLargeError,
    InvalidParamsError,
    KreinError,
    NoConvergenceError,
    NoStabilizationError,
    OneMinusKGSingularError,
    ResidualTooLargeError,
)
from .transfer import eval_transfer

log = logging.getLogger(__name__)

CONTRACTION_TOL = 1e-10
GRAM_TOL = 1e-10
COORD_COND_MAX = 1e10
ONE_MINUS_KG_TOL = 1e-12
RESTRICTION_RESIDUAL_TOL = 1e-6
DEFAULT_SCHEDULE = tuple(10.0 ** -k for k in range(1, 9))


@dataclass(frozen=True, eq=False)
class AngleOperator:
    K: np.ndarray

    @property
    def norm(self) -> float:
        return norm2(self.K)

    @property
    def is_contraction(self) -> bool:
        return self.norm <= 1.0 + CONTRACTION_TOL


@dataclass(frozen=True, eq=False)
class GraphSubspace:
    """Orthonormal basis (n x n_plus) of a graph subspace."""

    basis: np.ndarray

    @classmethod
    def from_angle(cls, K) -> "GraphSubspace":
        K = np.asarray(K, dtype=complex)
        stacked = np.vstack([np.eye(K.shape[1]), K])
        Q, _ = np.linalg.qr(stacked)
        return cls(Q)

    def gram(self, signs) -> np.ndarray:
        B = self.basis
        return B.conj().T @ (np.asarray(signs)[:, None] * B)

    def gram_min(self, signs) -> float:
        return float(np.linalg.eigvalsh(self.gram(signs))[0])

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


@dataclass(frozen=True)
class RiccatiResiduals:
    classical: float
    modified_ric1: float
    modified_ric2: float
    invariance_defect: float

    def max(self) -> float:
        return max(self.classical, self.modified_ric1, self.modified_ric2, self.invariance_defect)


@dataclass(frozen=True, eq=False)
class SpectralDiagnostics:
    eigenvalues: np.ndarray
    selected: np.ndarray
    gap: float
    gram_min: float
    coordinate_cond: float
    tie_break: bool = False


@dataclass(frozen=True, eq=False)
class ContinuationStep:
    epsilon: float
    K: np.ndarray
    difference: float


@dataclass(frozen=True, eq=False)
class ContinuationTrace:
    steps: list[ContinuationStep] = field(default_factory=list)
    final_epsilon: float = float("nan")
    ric1_residual: float = float("nan")
    mu: complex = complex("nan")


@dataclass(frozen=True, eq=False)
class RestrictionReport:
    """Restriction ``A+`` in graph coordinates: ``A+ (x, Kx) = (Xx, KXx)``."""

    X: np.ndarray
    X_adjoint_graph: np.ndarray
    spectrum: np.ndarray
    spectral_abscissa: float
    K: np.ndarray
    mu: complex
    formula_gap: float
    q_inv_norm: float

    def apply(self, u) -> np.ndarray:
        """``A+ u`` for ``u = (x, Kx)`` in the graph subspace."""
        x = np.asarray(u)[: self.X.shape[0]]
        y = self.X @ x
        return np.concatenate([y, self.K @ y])

    def apply_adjoint(self, v) -> np.ndarray:
        x = np.asarray(v)[: self.X.shape[0]]
        y = self.X_adjoint_graph @ x
        return np.concatenate([y, self.K @ y])


def _as_K(K) -> np.ndarray:
    if isinstance(K, AngleOperator):
        return K.K
    return np.asarray(K, dtype=complex)


def _require_dissipative(A: BlockOperator) -> None:
    verdict = check_dissipativity(A)
    if not verdict.j_dissipative:
        raise InvalidParamsError(
            f"operator is not J-dissipative (lambda_max of Re JA = {verdict.max_real_numeric:.3e})"
        )


def _ordered_subspace(T, Z, select) -> np.ndarray:
    ts, qs, w, m, s, sep, info = lapack.ztrsen(np.asarray(select, dtype=np.int32), T, Z, job="N")
    if info != 0:
        raise KreinError(f"ztrsen failed with info={info}")
    return qs[:, :m]


def _angle_from_basis(B, n_plus) -> tuple[np.ndarray, float]:
    top, bottom = B[:n_plus], B[n_plus:]
    cond = np.linalg.cond(top)
    if not cond <= COORD_COND_MAX:
        raise CoordinateDegenerateError(f"H+ coordinate block has condition {cond:.3e}")
    return np.linalg.solve(top.T, bottom.T).T, float(cond)


def solve_angle_spectral(A: BlockOperator, gap_tol: float = 1e-8, check: bool = True, max_candidates: int = 256):
    """Angle operator of the spectral subspace for the ``n_plus`` leftmost eigenvalues.

    Returns ``(AngleOperator, GraphSubspace, SpectralDiagnostics)``.  When the
    real parts at the cut are closer than ``gap_tol * max(1, ||A||)`` the
    clustered eigenvalues are tried in every admissible combination (ordered
    by ascending imaginary part) and the one whose graph has the largest
    smallest Gram eigenvalue wins; if none is nonnegative the gap is reported
    as too small.
    """
    if check:
        _require_dissipative(A)
    p, n = A.n_plus, A.structure.n
    signs = A.structure.signs
    T, Z = linalg.schur(A.matrix, output="complex")
    w = np.diag(T).copy()
    order = np.lexsort((w.imag, w.real))
    re_sorted = w.real[order]
    gap = float(re_sorted[p] - re_sorted[p - 1]) if p < n else np.inf
    tol = gap_tol * A.scale

    if gap > tol:
        candidates = [order[:p]]
        tie_break = False
    else:
        cut = re_sorted[p - 1]
        near = np.abs(w.real - cut) <= tol
        fixed = [i for i in order if w.real[i] < cut - tol]
        cluster = sorted(np.flatnonzero(near), key=lambda i: (w.imag[i], w.real[i]))
        need = p - len(fixed)
        count = _n_choose_k(len(cluster), need)
        if count > max_candidates:
            raise GapTooSmallError(f"{len(cluster)} eigenvalues cluster at Re={cut:.3e}; {count} selections")
        candidates = [np.array(fixed + list(c), dtype=int) for c in itertools.combinations(cluster, need)]
        tie_break = True

    best = None
    for idx in candidates:
        select = np.zeros(n, dtype=np.int32)
        select[idx] = 1
        B = _ordered_subspace(T, Z, select)
        gmin = GraphSubspace(B).gram_min(signs)
        if best is None or gmin > best[1] + 1e-14:
            best = (idx, gmin, B)
    idx, gmin, B = best
    if tie_break and gmin < -GRAM_TOL:
        raise GapTooSmallError(f"spectral gap {gap:.3e} below tolerance and no nonnegative selection found")

    K, cond = _angle_from_basis(B, p)
    angle = AngleOperator(K)
    if not angle.is_contraction:
        raise ContractionViolatedError(f"||K|| = {angle.norm!r} exceeds 1")
    if gmin < -GRAM_TOL:
        raise ContractionViolatedError(f"graph subspace is not nonnegative (Gram min {gmin:.3e})")
    diag = SpectralDiagnostics(
        eigenvalues=w[order],
        selected=np.sort(w[idx].real),
        gap=gap,
        gram_min=gmin,
        coordinate_cond=cond,
        tie_break=tie_break,
    )
    return angle, GraphSubspace(B), diag


def _n_choose_k(n, k):
    from math import comb

    return comb(n, k) if 0 <= k <= n else 0


def choose_mu(A: BlockOperator, bound: float = 0.25, kmax: int = 60) -> tuple[complex, float]:
    """Walk ``mu = -2^k (1 + ||A||)`` until ``||G(mu)|| < bound``."""
    base = 1.0 + A.norm
    for k in range(kmax + 1):
        mu = complex(-(2.0**k) * base)
        g = norm2(eval_transfer(A, mu).G)
        if g < bound:
            return mu, g
    raise GNormTooLargeError(f"no mu on the ray gave ||G(mu)|| < {bound}")


def solve_angle_fixed_point(
    A: BlockOperator,
    mu="auto",
    rtol: float = 1e-13,
    max_iter: int = 20000,
    theta: float = 1.0,
    check: bool = True,
):
    """Iterate ``K <- -F + (A22 - mu)^-1 (1 - KG)^-1 K (S - mu)`` from ``K = 0``.

    Returns ``(AngleOperator, iterations)``.  An explicit ``mu`` must satisfy
    ``||G(mu)|| < 1/2``; ``"auto"`` picks the first point on the ray with
    ``||G|| < 1/4``.  ``theta`` relaxes each step, ``K <- (1-theta) K + theta K_next``.
    """
    if check:
        _require_dissipative(A)
    if isinstance(mu, str):
        if mu != "auto":
            raise InvalidParamsError(f"mu must be a complex number or 'auto', got {mu!r}")
        mu, _ = choose_mu(A)
    ev = eval_transfer(A, mu)
    g = norm2(ev.G)
    if not g < 0.5:
        raise GNormTooLargeError(f"||G(mu)|| = {g:.4f} is not below 1/2 at mu={mu!r}")
    p, m = A.n_plus, A.n_minus
    lu = linalg.lu_factor(A.A22 - ev.mu * np.eye(m), check_finite=False)
    S_shift = ev.S - ev.mu * np.eye(p)
    Im = np.eye(m)

    K = np.zeros((m, p), dtype=complex)
    best = (np.inf, K)
    for it in range(1, max_iter + 1):
        inner = np.linalg.solve(Im - K @ ev.G, K @ S_shift)
        K_next = -ev.F + linalg.lu_solve(lu, inner, check_finite=False)
        K_new = (1.0 - theta) * K + theta * K_next
        step = norm2(K_new - K)
        if step < best[0]:
            best = (step, K)
        if norm2(K_new) > 1.1:
            raise ContractionViolatedError(f"||K_{it}|| = {norm2(K_new):.4f} exceeds 1.1")
        if step <= rtol * max(1.0, norm2(K)):
            return AngleOperator(K_new), it
        K = K_new
    raise NoConvergenceError(
        f"fixed point did not converge in {max_iter} iterations (best step {best[0]:.3e})",
        best_K=best[1],
        best_residual=best[0] / A.scale,
        iterations=max_iter,
    )


def _stabilized(diffs, atol) -> bool:
    if not diffs:
        return True
    if diffs[-1] <= atol:
        return True
    tail = diffs[-3:]
    return len(tail) >= 2 and all(b <= a for a, b in zip(tail, tail[1:]))


def solve_angle_continuation(A: BlockOperator, schedule=None, mu=None, check: bool = True, validate_tol=RESTRICTION_RESIDUAL_TOL):
    """Solve ``A - eps P+`` along a decreasing schedule of ``eps``.

    Each shifted operator is uniformly dissipative on ``H+`` so its spectral
    problem has a gap.  Returns ``(AngleOperator, ContinuationTrace)`` with
    ``K`` from the smallest ``eps``; that ``K`` is checked against the
    modified Riccati equation of the *original* operator.
    """
    if check:
        _require_dissipative(A)
    schedule = DEFAULT_SCHEDULE if schedule is None else tuple(schedule)
    if not schedule or any(e <= 0 for e in schedule) or any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise InvalidParamsError("schedule must be a non-empty strictly decreasing list of positive reals")
    steps = []
    prev = None
    Ip = np.eye(A.n_plus)
    for eps in schedule:
        A_eps = A.replace(A11=A.A11 - eps * Ip)
        angle, _, _ = solve_angle_spectral(A_eps, check=False)
        diff = np.nan if prev is None else norm2(angle.K - prev)
        steps.append(ContinuationStep(float(eps), angle.K, float(diff)))
        prev = angle.K
    diffs = [s.difference for s in steps[1:]]
    if not _stabilized(diffs, atol=1e-10 * max(1.0, norm2(prev))):
        raise NoStabilizationError(f"K_eps differences {diffs[-3:]} are not decreasing")
    if mu is None:
        mu = complex(-(1.0 + A.norm))
    res = riccati_residuals(A, prev, mu)
    trace = ContinuationTrace(steps, steps[-1].epsilon, res.modified_ric1, complex(mu))
    if res.modified_ric1 > validate_tol:
        raise ResidualTooLargeError(f"continuation limit has Ric1 residual {res.modified_ric1:.3e}")
    return AngleOperator(prev), trace


def riccati_residuals(A: BlockOperator, K, mu, basis=None) -> RiccatiResiduals:
    K = _as_K(K)
    ev = eval_transfer(A, mu)
    p, m = A.n_plus, A.n_minus
    one_kg = np.eye(m) - K @ ev.G
    smin = sigma_min(one_kg)
    if not smin > ONE_MINUS_KG_TOL:
        raise OneMinusKGSingularError(f"sigma_min(1 - KG) = {smin:.3e}")
    scale = A.scale
    A22_mu = A.A22 - ev.mu * np.eye(m)
    S_mu = ev.S - ev.mu * np.eye(p)

    classical = norm2(A.A21 + A.A22 @ K - K @ A.A11 - K @ A.A12 @ K) / scale
    ric1 = norm2(one_kg @ A22_mu @ (ev.F + K) - K @ S_mu) / scale
    rhs2 = np.linalg.solve(A22_mu, np.linalg.solve(one_kg, K @ S_mu))
    ric2 = norm2(ev.F + K - rhs2) / scale

    B = GraphSubspace.from_angle(K).basis if basis is None else np.asarray(basis)
    P = B @ B.conj().T
    defect = norm2((np.eye(A.structure.n) - P) @ A.matrix @ P) / scale
    return RiccatiResiduals(classical, ric1, ric2, defect)


def mu_independence(A: BlockOperator, K, mus) -> float:
    """Largest modified-Ric1 residual of a fixed ``K`` over several ``mu``."""
    return max(riccati_residuals(A, K, mu).modified_ric1 for mu in mus)


def restriction(A: BlockOperator, K, mu, residual_tol: float = RESTRICTION_RESIDUAL_TOL) -> RestrictionReport:
    """``X = S + G (1 - KG)^-1 K (S - mu)`` and its graph-coordinate adjoint.

    ``X`` represents ``A+`` through the coordinate map ``Q: (x, Kx) -> x``;
    the adjoint is ``(1 + K*K)^-1 X* (1 + K*K)`` in the same coordinates.
    ``||Q^-1|| = sqrt(1 + ||K||^2)`` never exceeds 2 for a contraction
    (the sharp bound is sqrt 2).
    """
    K = _as_K(K)
    res = riccati_residuals(A, K, mu)
    if res.max() > residual_tol:
        raise ResidualTooLargeError(f"Riccati residual {res.max():.3e} exceeds {residual_tol:.1e}")
    ev = eval_transfer(A, mu)
    p, m = A.n_plus, A.n_minus
    one_kg = np.eye(m) - K @ ev.G
    X = ev.S + ev.G @ np.linalg.solve(one_kg, K @ (ev.S - ev.mu * np.eye(p)))
    formula_gap = norm2(X - (A.A11 + A.A12 @ K)) / A.scale
    W = np.eye(p) + K.conj().T @ K
    X_adj = np.linalg.solve(W, X.conj().T @ W)
    q_inv = norm2(np.vstack([np.eye(p), K]))
    if q_inv > 2.0:
        raise ContractionViolatedError(f"||Q^-1|| = {q_inv:.4f} exceeds 2")
    spectrum = np.linalg.eigvals(X)
    return RestrictionReport(
        X=X,
        X_adjoint_graph=X_adj,
        spectrum=spectrum,
        spectral_abscissa=float(spectrum.real.max()),
        K=K,
        mu=ev.mu,
        formula_gap=formula_gap,
        q_inv_norm=q_inv,
    )


def spectral_location_check(report: RestrictionReport) -> bool:
    return report.spectral_abscissa <= 1e-8 * max(1.0, norm2(report.X))


def largest_principal_angle(B1, B2) -> float:
    return float(np.max(linalg.subspace_angles(np.asarray(B1), np.asarray(B2))))


@dataclass(frozen=True, eq=False)
class SolveOutcome:
    angle: AngleOperator
    subspace: GraphSubspace
    solver: str
    details: object = None


def solve_angle(A: BlockOperator, solver: str = "spectral", mu="auto", check: bool = True) -> SolveOutcome:
    """Dispatch to one solver; the spectral route falls back to continuation
    when the eigenvalue cut is degenerate or the graph coordinates are ill-posed."""
    if solver == "spectral":
        try:
            angle, sub, diag = solve_angle_spectral(A, check=check)
            return SolveOutcome(angle, sub, "spectral", diag)
        except (GapTooSmallError, CoordinateDegenerateError) as exc:
            log.info("spectral solver failed (%s); falling back to continuation", exc.code)
            solver = "continuation"
    if solver == "continuation":
        angle, trace = solve_angle_continuation(A, check=check)
        return SolveOutcome(angle, GraphSubspace.from_angle(angle.K), "continuation", trace)
    if solver == "fixed-point":
        angle, iters = solve_angle_fixed_point(A, mu=mu, check=check)
        return SolveOutcome(angle, GraphSubspace.from_angle(angle.K), "fixed-point", iters)
    raise InvalidParamsError(f"unknown solver {solver!r}")
