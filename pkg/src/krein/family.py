"""Test-problem generators and Galerkin-truncation diagnostics.

The structured family is built at its largest size and every member is the
leading principal part of that instance, so members are nested.  Its
construction fixes the transfer function at a reference point ``mu0``:

    A22 = diag(k^q),  A21 = (A22 - mu0) F0,  A12 = F0* (A22 - mu0)

which gives ``F(mu0) = F0`` and ``G(mu0) = F0*``.  With real ``mu0`` the
off-diagonal blocks of the Hermitian part of ``JA`` cancel, so the
dissipativity margin is set by ``A11`` and ``A22`` alone.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import BlockOperator, KreinStructure, norm2
from .errors import BadDimensionError, InvalidParamsError, KreinError

log = logging.getLogger(__name__)

KINDS = ("random_strict", "neutral", "structured_family", "growing_coupling", "decoupled_family")


@dataclass(frozen=True, eq=False)
class OperatorFamily:
    description: dict
    members: list
    nesting: bool = True
    reference: BlockOperator | None = None

    def __post_init__(self):
        dims = [(M.n_plus, M.n_minus) for M in self.members]
        if not dims:
            raise InvalidParamsError("a family needs at least one member")
        if any(b[0] <= a[0] and b[1] <= a[1] for a, b in zip(dims, dims[1:])):
            raise InvalidParamsError(f"member dimensions must increase, got {dims}")
        if self.nesting and not self.is_nested():
            raise InvalidParamsError("members flagged as nested are not leading principal parts")

    @property
    def sizes(self) -> list[int]:
        return [M.n_plus for M in self.members]

    def is_nested(self) -> bool:
        chain = list(self.members) + ([self.reference] if self.reference is not None else [])
        for small, big in zip(chain, chain[1:]):
            p, m = small.n_plus, small.n_minus
            for name, sl in (
                ("A11", (slice(p), slice(p))),
                ("A12", (slice(p), slice(m))),
                ("A21", (slice(m), slice(p))),
                ("A22", (slice(m), slice(m))),
            ):
                if not np.array_equal(getattr(big, name)[sl], getattr(small, name)):
                    return False
        return True


def _rng(seed):
    return np.random.default_rng(seed)


def _cgauss(rng, shape, complex_entries=True):
    if complex_entries:
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)
    return rng.standard_normal(shape).astype(complex)


def _positive_int(params, key, default=None):
    v = params.get(key, default)
    if v is None or int(v) != v or v < 1:
        raise InvalidParamsError(f"{key} must be a positive integer, got {v!r}")
    return int(v)


def _nonneg(params, key, default):
    v = float(params.get(key, default))
    if not v >= 0 or not math.isfinite(v):
        raise InvalidParamsError(f"{key} must be a finite non-negative real, got {v!r}")
    return v


def random_strict(n_plus: int, n_minus: int, eps: float = 1.0, seed=None, complex_entries: bool = True) -> BlockOperator:
    """``A = J W`` with ``W = -eps I - C C* + (skew)``, so ``Re [Ax, x] <= -eps ||x||^2``."""
    if not eps > 0:
        raise InvalidParamsError(f"eps must be positive, got {eps!r}")
    st = KreinStructure(n_plus, n_minus)
    rng = _rng(seed)
    n = st.n
    C = _cgauss(rng, (n, n), complex_entries) / math.sqrt(n)
    B = _cgauss(rng, (n, n), complex_entries) / math.sqrt(n)
    W = -eps * np.eye(n) - C @ C.conj().T + (B - B.conj().T) / 2
    return BlockOperator.from_matrix(st.signs[:, None] * W, n_plus)


def neutral(n_plus: int = 1, n_minus: int = 1, eps: float = 1.0, seed=None) -> BlockOperator:
    """``[[0, 1], [1, 0]]`` on coordinates ``(0, n_plus)``, decoupled from a strict remainder.

    The 2x2 part is J-dissipative with zero margin; its nonnegative invariant
    line is spanned by ``(1, -1)`` so the corresponding ``K`` entry is -1.
    """
    st = KreinStructure(n_plus, n_minus)
    M = np.zeros((st.n, st.n), dtype=complex)
    M[0, n_plus] = 1.0
    M[n_plus, 0] = 1.0
    if n_plus > 1 or n_minus > 1:
        if n_plus == 1 or n_minus == 1:
            # remainder lives in one sign only: make it a plain dissipative diagonal
            rest = np.r_[1:n_plus, n_plus + 1 : st.n]
            rng = _rng(seed)
            d = -eps - rng.random(rest.size)
            M[rest, rest] = st.signs[rest] * d
        else:
            R = random_strict(n_plus - 1, n_minus - 1, eps, seed).matrix
            rest = np.r_[1:n_plus, n_plus + 1 : st.n]
            M[np.ix_(rest, rest)] = R
    return BlockOperator.from_matrix(M, n_plus)


def _banded_noise(rng, N, complex_entries=True):
    """Entries bounded by ``2^-|i-j|`` so the Schur test gives ``||Z|| <= 3``."""
    idx = np.arange(N)
    decay = 2.0 ** -np.abs(idx[:, None] - idx[None, :])
    xi = _cgauss(rng, (N, N), complex_entries)
    xi /= np.maximum(1.0, np.abs(xi))
    return decay * xi


def structured_family(
    sizes,
    q: float = 1.0,
    decay: float = 2.0,
    c: float = 1.0,
    rho: float = 0.5,
    margin: float = 1.0,
    mu0: float = -1.0,
    a11: str = "dissipative",
    reference_size: int | None = None,
    seed=None,
    complex_entries: bool = True,
) -> OperatorFamily:
    """Nested family with ``G(mu0) = F0*`` and ``sigma_j(F0) <= (1 + rho) c j^-decay``.

    ``F0 = diag(c k^-decay) (I + rho Z / 3)`` with ``||Z|| <= 3``.  ``a11``
    selects ``-margin I + iH`` (``"dissipative"``, H Hermitian and banded) or
    ``-diag(k) - margin I`` (``"sectorial"``).  ``reference_size`` appends a
    larger nested instance kept out of the member list.
    """
    sizes = sorted({int(s) for s in sizes})
    if not sizes or sizes[0] < 1:
        raise InvalidParamsError(f"sizes must be positive integers, got {sizes!r}")
    if not mu0 < 1.0:
        raise InvalidParamsError("mu0 must be real and below the spectrum of A22 (< 1)")
    if not 0 <= rho <= 1 or margin < 0 or c <= 0:
        raise InvalidParamsError("need 0 <= rho <= 1, margin >= 0, c > 0")
    if a11 not in ("dissipative", "sectorial"):
        raise InvalidParamsError(f"a11 must be 'dissipative' or 'sectorial', got {a11!r}")
    N = max(sizes + ([int(reference_size)] if reference_size else []))
    rng = _rng(seed)
    k = np.arange(1, N + 1, dtype=float)
    A22 = np.diag(k**q).astype(complex)
    F0 = (c * k ** -decay)[:, None] * (np.eye(N) + rho * _banded_noise(rng, N, complex_entries) / 3.0)
    D = (k**q - mu0)[:, None]
    A21 = D * F0
    A12 = A21.conj().T
    if a11 == "dissipative":
        Hn = _banded_noise(rng, N, complex_entries)
        H = (Hn + Hn.conj().T) / 2
        A11 = -margin * np.eye(N) + 1j * H
    else:
        A11 = -np.diag(k) - margin * np.eye(N)
    full = BlockOperator.from_blocks(A11, A12, A21, A22)

    def lead(n):
        return BlockOperator.from_blocks(A11[:n, :n], A12[:n, :n], A21[:n, :n], A22[:n, :n])

    members = [lead(n) for n in sizes]
    reference = full if reference_size and N > sizes[-1] else None
    desc = {
        "kind": "structured_family",
        "sizes": sizes,
        "q": q,
        "decay": decay,
        "c": c,
        "rho": rho,
        "margin": margin,
        "mu0": mu0,
        "a11": a11,
        "reference_size": reference_size,
        "seed": seed,
    }
    return OperatorFamily(desc, members, nesting=True, reference=reference)


def growing_coupling(sizes, q: float = 2.0, margin: float = 1.0, seed=None) -> OperatorFamily:
    """One-dimensional ``H+`` coupled to ``diag(k^q)`` with weights ``k^(q/2)``.

    ``R(0) = sum_k 1`` grows linearly in the size, so the uniform bound on
    ``R`` fails along the family.
    """
    sizes = sorted({int(s) for s in sizes})
    N = sizes[-1]
    k = np.arange(1, N + 1, dtype=float)
    a = k ** (q / 2)
    A11 = np.array([[-margin]], dtype=complex)
    A21 = a[:, None].astype(complex)
    A22 = np.diag(k**q).astype(complex)
    members = [
        BlockOperator.from_blocks(A11, A21[:n].conj().T, A21[:n], A22[:n, :n]) for n in sizes
    ]
    desc = {"kind": "growing_coupling", "sizes": sizes, "q": q, "margin": margin, "seed": seed}
    return OperatorFamily(desc, members, nesting=False)


def decoupled_family(sizes, q: float = 1.0, margin: float = 1.0, seed=None) -> OperatorFamily:
    """Nested family with ``A12 = A21 = 0`` (every angle operator vanishes)."""
    sizes = sorted({int(s) for s in sizes})
    N = sizes[-1]
    k = np.arange(1, N + 1, dtype=float)
    rng = _rng(seed)
    Hn = _banded_noise(rng, N)
    A11 = -margin * np.eye(N) + 1j * (Hn + Hn.conj().T) / 2
    A22 = np.diag(k**q).astype(complex)
    Z = np.zeros((N, N), dtype=complex)
    members = [BlockOperator.from_blocks(A11[:n, :n], Z[:n, :n], Z[:n, :n], A22[:n, :n]) for n in sizes]
    desc = {"kind": "decoupled_family", "sizes": sizes, "q": q, "margin": margin, "seed": seed}
    return OperatorFamily(desc, members, nesting=True)


def generate(kind: str, params: dict | None = None, seed=None):
    """Dispatch to a generator by name; returns a BlockOperator or an OperatorFamily."""
    params = dict(params or {})
    try:
        if kind == "random_strict":
            return random_strict(
                _positive_int(params, "n_plus", 1),
                _positive_int(params, "n_minus", 1),
                float(params.get("eps", 1.0)),
                seed,
                bool(params.get("complex", True)),
            )
        if kind == "neutral":
            return neutral(_positive_int(params, "n_plus", 1), _positive_int(params, "n_minus", 1), float(params.get("eps", 1.0)), seed)
        if kind == "structured_family":
            return structured_family(
                params.get("sizes", (8, 16, 32)),
                q=float(params.get("q", 1.0)),
                decay=float(params.get("decay", 2.0)),
                c=float(params.get("c", 1.0)),
                rho=float(params.get("rho", 0.5)),
                margin=_nonneg(params, "margin", 1.0),
                mu0=float(params.get("mu0", -1.0)),
                a11=str(params.get("a11", "dissipative")),
                reference_size=params.get("reference_size"),
                seed=seed,
            )
        if kind == "growing_coupling":
            return growing_coupling(params.get("sizes", (8, 16, 32)), float(params.get("q", 2.0)), _nonneg(params, "margin", 1.0), seed)
        if kind == "decoupled_family":
            return decoupled_family(params.get("sizes", (8, 16, 32)), float(params.get("q", 1.0)), _nonneg(params, "margin", 1.0), seed)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, KreinError):
            raise
        raise InvalidParamsError(str(exc)) from exc
    raise InvalidParamsError(f"unknown kind {kind!r}; expected one of {KINDS}")


def truncate(A: BlockOperator, m: int) -> BlockOperator:
    """Keep the first ``m`` coordinates of ``H+``; ``A22`` is untouched."""
    if int(m) != m or not 1 <= m <= A.n_plus:
        raise BadDimensionError(f"m must satisfy 1 <= m <= {A.n_plus}, got {m!r}")
    m = int(m)
    return BlockOperator.from_blocks(A.A11[:m, :m], A.A12[:m, :], A.A21[:, :m], A.A22)


def _pad(K, shape) -> np.ndarray:
    out = np.zeros(shape, dtype=complex)
    out[: K.shape[0], : K.shape[1]] = K
    return out


def trend_verdict(values, rtol: float = 1e-9) -> str:
    v = np.asarray([x for x in values if np.isfinite(x)], dtype=float)
    if v.size < 2:
        return "insufficient points"
    slack = rtol * max(1.0, float(np.abs(v).max()))
    if np.all(np.diff(v) <= slack):
        return "monotone-decreasing"
    if v.max() <= 2.0 * max(abs(v[0]), slack):
        return "bounded"
    return "growing"


@dataclass
class GalerkinReport:
    sizes: list
    k_difference: list
    surrogate: list
    g_norm: list
    pair_norms: list
    r_sup: list
    g_ray: list
    verdicts: dict
    errors: dict = field(default_factory=dict)
    reference_size: int = 0
    mu: complex = 0j

    def rows(self) -> list[dict]:
        return [
            {
                "size": s,
                "k_difference": kd,
                "surrogate": sg,
                "g_norm": g,
                "pair_left": p[0],
                "pair_right": p[1],
                "r_sup": r,
            }
            for s, kd, sg, g, p, r in zip(self.sizes, self.k_difference, self.surrogate, self.g_norm, self.pair_norms, self.r_sup)
        ]


def galerkin_convergence(family_or_pair, alpha: float = 0.5, epsilon: float = 0.1, solver: str = "spectral") -> GalerkinReport:
    """Solve every member and compare with the reference instance.

    The reference is ``family.reference`` when present, else the last
    member.  ``K_m`` is zero-padded to the reference shape; the product
    surrogate is ``||K_m G K_m - K G K||`` with ``G`` taken from the
    reference at ``mu = -(1 + ||A_ref||)``.  Solver failures are recorded
    per member and leave NaN in that row.
    """
    from .riccati import solve_angle
    from .semigroup import _ray, default_r_grid
    from .transfer import envelope, eval_transfer, pair_norms

    if isinstance(family_or_pair, OperatorFamily):
        members = list(family_or_pair.members)
        reference = family_or_pair.reference or members[-1]
    else:
        A, schedule = family_or_pair
        members = [truncate(A, m) for m in schedule]
        reference = A
    mu = complex(-(1.0 + reference.norm))
    G = eval_transfer(reference, mu).G
    shape = (reference.n_minus, reference.n_plus)
    errors: dict = {}
    try:
        K_ref = _pad(solve_angle(reference, solver=solver).angle.K, shape)
    except KreinError as exc:
        K_ref = None
        errors["reference"] = exc.code
    KGK_ref = None if K_ref is None else K_ref @ G @ K_ref

    kd, sur, gn, pn, rs = [], [], [], [], []
    for M in members:
        key = str(M.n_plus)
        try:
            Km = _pad(solve_angle(M, solver=solver).angle.K, shape)
            kd.append(norm2(Km - K_ref) if K_ref is not None else math.nan)
            sur.append(norm2(Km @ G @ Km - KGK_ref) if K_ref is not None else math.nan)
        except KreinError as exc:
            errors[key] = exc.code
            kd.append(math.nan)
            sur.append(math.nan)
        gn.append(norm2(eval_transfer(M, mu).G))
        try:
            pn.append(pair_norms(M, alpha))
        except KreinError as exc:
            errors[f"{key}:pair_norms"] = exc.code
            pn.append((math.nan, math.nan))
        valid = envelope(M, default_r_grid(M, epsilon)).valid()
        rs.append(max((s.r_norm for s in valid), default=math.nan))
    g_ray = [(abs(s.mu), s.g_norm) for s in envelope(reference, _ray(reference)).valid()]
    verdicts = {
        "k_difference": trend_verdict(kd),
        "surrogate": trend_verdict(sur),
        "g_norm": trend_verdict(gn),
        "pair_norms": trend_verdict([max(p) for p in pn]),
        "r_sup": trend_verdict(rs),
        "g_ray": trend_verdict([g for _, g in g_ray]),
    }
    if len(members) < 2:
        verdicts = {k: ("insufficient points" if k != "g_ray" else v) for k, v in verdicts.items()}
    return GalerkinReport(
        sizes=[M.n_plus for M in members],
        k_difference=kd,
        surrogate=sur,
        g_norm=gn,
        pair_norms=pn,
        r_sup=rs,
        g_ray=g_ray,
        verdicts=verdicts,
        errors=errors,
        reference_size=reference.n_plus,
        mu=mu,
    )
