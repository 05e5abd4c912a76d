"""Resolvent diagnostics for a square generator ``T``.

Every supremum or integral over an unbounded set is computed on a finite
sample plus the Neumann tail bound ``||(T - lam)^-1|| <= 1/(|lam| - ||T||)``,
and the truncation radius used is reported.  For finite matrices the
half-plane suprema are attained on (or approached from) the boundary line,
since ``lam -> ||(T - lam)^-1||`` and ``lam -> ||lam (T - lam)^-1||`` are
subharmonic and bounded at infinity; the line is what gets sampled.

The power bound over ``n = 1..n_max`` is a necessary-condition check only:
the generation criterion asks for every ``n``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, linalg

from .core import BlockOperator, check_dissipativity, hermitian_part, norm2, sigma_min
from .errors import (
    Alpha0InSpectrumError,
    BranchCutError,
    KreinError,
    NotDiagonalizableError,
    OverflowAtLargeTError,
    SpectrumInHalfPlaneError,
)

log = logging.getLogger(__name__)

#: "finite" means below FINITE_FACTOR * (1 + ||T||).
FINITE_FACTOR = 1e6
#: sigma_min at or below this counts as a singular shift.
SINGULAR_SIGMA = 1e-300
DEFAULT_BETAS = (0.0, 0.01, 0.1, 1.0)
DEFAULT_EPSILONS = (0.1, 0.5, 1.0)
DEFAULT_GOMILKO_OFFSETS = (0.1, 1.0, 10.0, 100.0)

LABEL_PRIORITY = (
    "exponentially_stable",
    "c0_type_zero",
    "holomorphic",
    "quasi_holomorphic",
    "contraction",
    "c0_general",
    "inconclusive",
)


def _T(T) -> np.ndarray:
    T = np.array(T, dtype=complex, ndmin=2)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ValueError(f"T must be square, got shape {T.shape}")
    return T


def finite_threshold(T) -> float:
    return FINITE_FACTOR * (1.0 + norm2(T))


def spectral_abscissa(T) -> float:
    return float(np.linalg.eigvals(_T(T)).real.max())


def resolvent_norm(T, lam) -> float:
    T = _T(T)
    s = sigma_min(T - lam * np.eye(T.shape[0]))
    return math.inf if s <= SINGULAR_SIGMA else 1.0 / s


def _sigma_min_batch(T, lams, chunk=256) -> np.ndarray:
    n = T.shape[0]
    lams = np.asarray(lams, dtype=complex)
    out = np.empty(lams.shape[0])
    eye = np.eye(n)
    for start in range(0, lams.shape[0], chunk):
        block = lams[start : start + chunk]
        stack = T[None, :, :] - block[:, None, None] * eye[None, :, :]
        out[start : start + chunk] = np.linalg.svd(stack, compute_uv=False)[:, -1]
    return out


def _resolvent_batch(T, lams) -> np.ndarray:
    s = _sigma_min_batch(T, lams)
    with np.errstate(divide="ignore"):
        return np.where(s <= SINGULAR_SIGMA, np.inf, 1.0 / s)


@dataclass(frozen=True)
class LineSup:
    value: float
    argmax: float
    radius: float


def _line_sup(fun, centers, radius, width, zoom_rounds=5, peaks=3) -> tuple[float, float]:
    """Maximize ``fun(y)`` (vectorized) over ``|y| <= radius`` by grid plus local zoom."""
    centers = np.asarray(centers, dtype=float)
    lo_c, hi_c = (centers.min(), centers.max()) if centers.size else (0.0, 0.0)
    tiny = max(1e-6 * width, 1e-12)
    log_side = np.geomspace(tiny, max(radius, 2 * tiny), 60)
    ys = np.concatenate(
        [
            [0.0],
            centers,
            log_side,
            -log_side,
            np.linspace(lo_c - width, hi_c + width, 201),
        ]
    )
    ys = np.unique(np.clip(ys, -radius, radius))
    vals = fun(ys)
    if np.any(np.isinf(vals)):
        i = int(np.argmax(vals))
        return math.inf, float(ys[i])
    # local maxima, best first
    is_peak = np.ones(ys.size, dtype=bool)
    is_peak[1:] &= vals[1:] >= vals[:-1]
    is_peak[:-1] &= vals[:-1] >= vals[1:]
    cand = np.flatnonzero(is_peak)
    cand = cand[np.argsort(-vals[cand])][:peaks]
    best_v, best_y = float(vals.max()), float(ys[np.argmax(vals)])
    for i in cand:
        a = ys[max(i - 1, 0)]
        b = ys[min(i + 1, ys.size - 1)]
        for _ in range(zoom_rounds):
            grid = np.linspace(a, b, 11)
            gv = fun(grid)
            j = int(np.argmax(gv))
            if gv[j] > best_v:
                best_v, best_y = float(gv[j]), float(grid[j])
            if math.isinf(gv[j]):
                return math.inf, float(grid[j])
            a, b = grid[max(j - 1, 0)], grid[min(j + 1, 10)]
    return best_v, best_y


def gearhart_line(T, beta: float, region: str = "halfplane") -> LineSup:
    """Supremum of ``||(T - lam)^-1||`` on ``Re lam = beta`` with its truncation radius.

    With ``region="halfplane"`` (the Gearhart quantity) the result is
    infinite as soon as an eigenvalue has real part ``>= beta``; with
    ``region="line"`` only eigenvalues on the line itself make it infinite.
    """
    if region not in ("halfplane", "line"):
        raise ValueError(f"region must be 'halfplane' or 'line', got {region!r}")
    T = _T(T)
    w = np.linalg.eigvals(T)
    dist = np.abs(beta - w.real)
    touching = w.real >= beta - 1e-12 if region == "halfplane" else dist <= 1e-12
    if np.any(touching):
        i = int(np.argmax(touching))
        return LineSup(math.inf, float(w[i].imag), 0.0)
    nT = norm2(T)
    width = max(dist.min(), 1e-3 * max(1.0, nT))

    def fun(ys):
        return _resolvent_batch(T, beta + 1j * ys)

    radius = max(2.0 * nT, 1.0)
    while True:
        val, arg = _line_sup(fun, w.imag, radius, width)
        # tail: 1/(sqrt(beta^2 + y^2) - ||T||) <= val for |y| >= need
        need = math.sqrt(max(0.0, (nT + 1.0 / val) ** 2 - beta**2))
        if need <= radius:
            return LineSup(val, arg, radius)
        radius = 1.01 * need


def gearhart_sup(T, beta: float, region: str = "halfplane") -> float:
    """``sup ||(T - lam)^-1||`` over ``Re lam > beta``, sampled on the boundary line.

    Infinite when the spectrum reaches the half-plane.  ``region="line"``
    gives the supremum over the line alone.
    """
    return gearhart_line(T, beta, region).value


def holomorphic_line(T, epsilon: float = 0.0) -> LineSup:
    T = _T(T)
    w = np.linalg.eigvals(T)
    nT = norm2(T)
    scale = max(1.0, nT)
    if np.any(w.real > epsilon + 1e-12 * scale):
        bad = w[np.argmax(w.real)]
        raise SpectrumInHalfPlaneError(complex(bad), epsilon)
    # half-plane is open: sample just inside its boundary
    line = epsilon + 1e-9 * scale
    width = max(line - w.real.max(), 1e-3 * scale)

    def fun(ys):
        lam = line + 1j * ys
        return np.abs(lam) * _resolvent_batch(T, lam)

    radius = max(2.0 * nT, 1.0)
    while True:
        val, arg = _line_sup(fun, w.imag, radius, width)
        val = max(val, 1.0)  # limit of |lam| ||(T - lam)^-1|| at infinity
        if math.isinf(val):
            return LineSup(val, arg, radius)
        c = val * (1.0 + 1e-3)
        need = c * nT / (c - 1.0) if nT > 0 else 0.0
        if need <= radius:
            return LineSup(val, arg, radius)
        radius = 1.01 * need


def holomorphic_bound(T, epsilon: float = 0.0) -> float:
    """``sup |lam| ||(T - lam)^-1||`` over ``Re lam > epsilon``."""
    return holomorphic_line(T, epsilon).value


def quasi_holomorphic_table(T, epsilons=DEFAULT_EPSILONS) -> list[tuple[float, float]]:
    out = []
    for eps in epsilons:
        try:
            out.append((float(eps), holomorphic_bound(T, eps)))
        except SpectrumInHalfPlaneError:
            out.append((float(eps), math.inf))
    return out


def is_quasi_holomorphic(T, epsilons=DEFAULT_EPSILONS) -> bool:
    thr = finite_threshold(T)
    return all(c < thr for _, c in quasi_holomorphic_table(T, epsilons))


def default_fmp_grid(T, omega: float, points: int = 41) -> np.ndarray:
    return omega + max(1.0, norm2(T)) * np.geomspace(1e-3, 1e3, points)


def fmp_check(T, omega: float, n_max: int = 20, lambda_grid=None) -> float:
    """Smallest ``C`` with ``||(T - lam)^-n|| <= C (lam - omega)^-n`` on the grid.

    ``n`` runs over ``1..n_max`` and ``lam`` over real grid points above
    ``omega``; the ratio tends to 1 as ``lam -> inf`` so ``C >= 1``.
    """
    T = _T(T)
    w = np.linalg.eigvals(T)
    if np.any(w.real >= omega):
        raise SpectrumInHalfPlaneError(complex(w[np.argmax(w.real)]), omega)
    grid = default_fmp_grid(T, omega) if lambda_grid is None else np.asarray(lambda_grid, dtype=float)
    if np.any(grid <= omega):
        raise ValueError("lambda grid must lie strictly above omega")
    n = T.shape[0]
    C = 1.0
    for lam in grid:
        lu = linalg.lu_factor(T - lam * np.eye(n), check_finite=False)
        Z = np.eye(n, dtype=complex)
        for _ in range(n_max):
            Z = (lam - omega) * linalg.lu_solve(lu, Z, check_finite=False)
            C = max(C, norm2(Z))
    return C


def _gomilko_scale(T, delta):
    w = np.linalg.eigvals(T)
    return w, max(delta - w.real.max(), 1e-3 * max(1.0, norm2(T)))


def _gomilko_integral(T, x, delta, rtol=1e-10) -> float:
    """``int ||(T - lam)^-1 x||^2 + ||(T* - lam)^-1 x||^2 dy`` on ``lam = delta + iy``.

    The real line is mapped onto ``(-pi/2, pi/2)`` by ``y = c tan(theta)``;
    the integrand decays like ``2/y^2`` so the mapped integrand stays bounded
    and no tail truncation is needed.
    """
    n = T.shape[0]
    I = np.eye(n)
    Th = T.conj().T
    w, c = _gomilko_scale(T, delta)

    def integrand(theta):
        y = c * math.tan(theta)
        lam = delta + 1j * y
        u = np.linalg.solve(T - lam * I, x)
        v = np.linalg.solve(Th - lam * I, x)
        f = float(np.vdot(u, u).real + np.vdot(v, v).real)
        return f * c / math.cos(theta) ** 2

    brk = sorted({float(np.arctan(wi.imag / c)) for wi in w} | {0.0})
    edges = [-math.pi / 2] + brk + [math.pi / 2]
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        if b - a <= 1e-15:
            continue
        val, _ = integrate.quad(integrand, a, b, epsabs=0.0, epsrel=rtol, limit=500)
        total += val
    return total


def gomilko_functional(T, omega: float, x, deltas) -> list[float]:
    """``(delta - omega) * int_{Re lam = delta} (||(T-lam)^-1 x||^2 + ||(T*-lam)^-1 x||^2) |dlam|``."""
    T = _T(T)
    x = np.asarray(x, dtype=complex).ravel()
    if x.shape != (T.shape[0],):
        raise ValueError(f"x must have length {T.shape[0]}")
    if abs(np.linalg.norm(x) - 1.0) > 1e-12:
        raise ValueError("x must be a unit vector")
    w = np.linalg.eigvals(T)
    if np.any(w.real >= omega):
        raise SpectrumInHalfPlaneError(complex(w[np.argmax(w.real)]), omega)
    out = []
    for d in deltas:
        if not d > omega:
            raise ValueError(f"delta={d} must exceed omega={omega}")
        out.append((d - omega) * _gomilko_integral(T, x, d))
    return out


def gomilko_worst_basis(T, omega: float, delta: float) -> float:
    """Largest Gomilko functional over the standard basis vectors.

    By Plancherel, ``int ||(T - delta - iy)^-1 x||^2 dy = 2 pi x* P x`` where
    ``(T - delta)* P + P (T - delta) = -I``; the two Lyapunov solutions give
    every basis vector at once.
    """
    T = _T(T)
    n = T.shape[0]
    w = np.linalg.eigvals(T)
    if np.any(w.real >= omega):
        raise SpectrumInHalfPlaneError(complex(w[np.argmax(w.real)]), omega)
    Ad = T - delta * np.eye(n)
    P = linalg.solve_continuous_lyapunov(Ad.conj().T, -np.eye(n))
    Q = linalg.solve_continuous_lyapunov(Ad, -np.eye(n))
    vals = 2 * np.pi * (np.diag(P).real + np.diag(Q).real)
    return float((delta - omega) * vals.max())


def numerical_range_sector(T, n_theta: int = 720) -> tuple[float, float | None]:
    """Numerical abscissa and the half-angle of the smallest sector around the
    negative real axis containing the sampled numerical range (``None`` if the
    range leaves every sector of angle below pi/2)."""
    T = _T(T)
    abscissa = float(np.linalg.eigvalsh(hermitian_part(T))[-1])
    scale = max(1.0, norm2(T))
    rot = np.exp(1j * np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False))[:, None, None] * T[None]
    _, V = np.linalg.eigh((rot + rot.conj().transpose(0, 2, 1)) / 2)
    v = V[:, :, -1]
    pts = np.einsum("ki,ij,kj->k", v.conj(), T, v)
    pts = pts[np.abs(pts) > 1e-12 * scale]
    if pts.size == 0:
        return abscissa, 0.0
    alpha = float(np.max(np.abs(np.angle(-pts))))
    if alpha >= np.pi / 2 - 1e-12:
        return abscissa, None
    return abscissa, alpha


def default_t_grid(points: int = 64) -> np.ndarray:
    return np.geomspace(0.5, 50.0, points)


def expm_curve(T, t_grid=None) -> tuple[np.ndarray, np.ndarray]:
    T = _T(T)
    ts = default_t_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        logs = np.array([math.log(n) if 0 < (n := norm2(linalg.expm(t * T))) < math.inf else math.nan for t in ts])
    return ts, logs


def expm_type(T, t_grid=None) -> float:
    """Least-squares slope of ``log ||exp(tT)||`` over the larger half of the grid.

    Points where the norm over- or underflows are dropped; fewer than four
    usable points raise ``OverflowAtLargeTError``.
    """
    ts, logs = expm_curve(T, t_grid)
    half = slice(ts.size // 2, None)
    t_h, l_h = ts[half], logs[half]
    ok = np.isfinite(l_h)
    if ok.sum() < 4:
        raise OverflowAtLargeTError("too few finite values of log||exp(tT)||; shrink the time grid")
    return float(np.polyfit(t_h[ok], l_h[ok], 1)[0])


def gearhart_type(T, threshold=None, iterations: int = 8) -> float:
    """Smallest ``beta`` whose line supremum is below the finiteness threshold.

    Log-bisection on ``beta - spectral_abscissa`` over ``[1e-14, 1] * (1 + ||T||)``.
    """
    T = _T(T)
    a = spectral_abscissa(T)
    thr = finite_threshold(T) if threshold is None else threshold
    s = 1.0 + norm2(T)
    lo, hi = 1e-14 * s, 1.0 * s
    while gearhart_sup(T, a + hi) >= thr:
        hi *= 4.0
        if hi > 1e6 * s:
            return math.inf
    if gearhart_sup(T, a + lo) < thr:
        return a + lo
    for _ in range(iterations):
        mid = math.sqrt(lo * hi)
        if gearhart_sup(T, a + mid) < thr:
            hi = mid
        else:
            lo = mid
    return a + hi


def compact_perturbation_radius(T, V, epsilon: float, n_lines: int = 6, n_imag: int = 121, extent: float = 1e3):
    """Sampled radius beyond which ``||(T + V - lam)^-1|| <= 1/(2 epsilon)`` on ``Re lam >= epsilon``.

    Returns ``(r, outer_radius)``: every sample with ``|lam| > r`` meets the
    bound; ``r < outer_radius`` means the bound was observed on an outer shell.
    """
    M = _T(T) + _T(V)
    s = max(1.0, norm2(M))
    bound = 1.0 / (2.0 * epsilon) * (1.0 + 1e-9)
    res = np.concatenate([epsilon + s * np.concatenate([[0.0], np.geomspace(1e-2, extent, n_lines - 1)])])
    ims = np.concatenate([[0.0], s * np.geomspace(1e-2, extent, n_imag // 2)])
    ims = np.concatenate([-ims[1:], ims])
    lams = (res[:, None] + 1j * ims[None, :]).ravel()
    vals = _resolvent_batch(M, lams)
    bad = np.abs(lams[vals > bound])
    r = float(bad.max()) if bad.size else 0.0
    return r, float(np.abs(lams).max())


@dataclass
class SemigroupReport:
    numerical_abscissa: float
    sector_angle: float | None
    gearhart: list[tuple[float, float]]
    holomorphic_constant: float
    quasi_holomorphic: list[tuple[float, float]]
    fmp_constant: float
    fmp_omega: float
    gomilko: list[tuple[float, float]]
    gomilko_omega: float
    exp_type_spectral: float
    exp_type_gearhart: float
    exp_type_curve: float
    classification: str
    labels: list[str] = field(default_factory=list)
    truncation_radii: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    threshold: float = math.nan
    norm: float = math.nan


def classify(
    T,
    betas=DEFAULT_BETAS,
    epsilons=DEFAULT_EPSILONS,
    t_grid=None,
    gomilko_offsets=DEFAULT_GOMILKO_OFFSETS,
    n_max: int = 20,
) -> SemigroupReport:
    """Run every diagnostic on ``T`` and summarize.

    ``labels`` lists every property the measured constants support;
    ``classification`` is the first of them in ``LABEL_PRIORITY``, which ranks
    growth (exponential stability, type zero) ahead of regularity
    (holomorphic, quasi-holomorphic, contraction).
    """
    T = _T(T)
    nT = norm2(T)
    thr = finite_threshold(T)
    tol = 1e-10 * max(1.0, nT)
    errors: dict[str, str] = {}
    radii: dict[str, float] = {}

    num_abs, sector = numerical_range_sector(T)
    a = spectral_abscissa(T)

    gear = []
    for b in betas:
        ls = gearhart_line(T, b)
        gear.append((float(b), ls.value))
        radii[f"gearhart[{b:g}]"] = ls.radius

    try:
        hl = holomorphic_line(T, 0.0)
        hol = hl.value
        radii["holomorphic"] = hl.radius
    except SpectrumInHalfPlaneError:
        hol = math.inf
    quasi = quasi_holomorphic_table(T, epsilons)

    fmp_omega = max(0.0, a) + 0.1
    fmp = fmp_check(T, fmp_omega, n_max=n_max)

    g_omega = max(0.0, a) + 1.0
    gom = []
    for off in gomilko_offsets:
        d = g_omega + off
        gom.append((float(d), gomilko_worst_basis(T, g_omega, d)))

    try:
        exp_g = gearhart_type(T, thr)
    except KreinError as exc:  # pragma: no cover - defensive
        exp_g = math.nan
        errors["exp_type_gearhart"] = exc.code
    try:
        exp_c = expm_type(T, t_grid)
    except OverflowAtLargeTError as exc:
        exp_c = math.nan
        errors["exp_type_curve"] = exc.code

    def finite(v):
        return v < thr

    labels = []
    gear0 = dict(gear).get(0.0, gearhart_sup(T, 0.0))
    exp_stable = finite(gear0) and a < 0
    if exp_stable:
        labels.append("exponentially_stable")
    pos = [v for b, v in gear if b > 0]
    if not exp_stable and pos and all(finite(v) for v in pos) and all(finite(v) for _, v in gom):
        labels.append("c0_type_zero")
    if finite(hol):
        labels.append("holomorphic")
    if quasi and all(finite(c) for _, c in quasi):
        labels.append("quasi_holomorphic")
    if num_abs <= tol:
        labels.append("contraction")
    if not labels:
        labels.append("inconclusive" if "exp_type_gearhart" in errors else "c0_general")
    primary = next(lbl for lbl in LABEL_PRIORITY if lbl in labels)

    return SemigroupReport(
        numerical_abscissa=num_abs,
        sector_angle=sector,
        gearhart=gear,
        holomorphic_constant=hol,
        quasi_holomorphic=quasi,
        fmp_constant=fmp,
        fmp_omega=fmp_omega,
        gomilko=gom,
        gomilko_omega=g_omega,
        exp_type_spectral=a,
        exp_type_gearhart=exp_g,
        exp_type_curve=exp_c,
        classification=primary,
        labels=labels,
        truncation_radii=radii,
        errors=errors,
        threshold=thr,
        norm=nT,
    )


# ---------------------------------------------------------------------------
# hypothesis checkers for the two generation results


@dataclass
class ConditionVerdict:
    passed: bool
    detail: dict = field(default_factory=dict)


@dataclass
class HypothesisVerdict:
    conditions: dict
    dissipative: bool
    uniform_margin: float
    passed: bool
    prediction: str
    cross_check: dict = field(default_factory=dict)


def _members(A_or_family) -> list[BlockOperator]:
    if isinstance(A_or_family, BlockOperator):
        return [A_or_family]
    members = getattr(A_or_family, "members", A_or_family)
    return list(members)


def decay_exponent(values, rel_floor: float = 1e-8) -> float:
    """Slope of ``log sigma_j`` against ``log j`` over the numerically nonzero values."""
    s = np.sort(np.asarray(values, dtype=float))[::-1]
    if s.size == 0 or s[0] == 0:
        return -math.inf
    keep = s > rel_floor * s[0]
    s = s[keep]
    if s.size < 3:
        return -math.inf
    j = np.arange(1, s.size + 1)
    return float(np.polyfit(np.log(j), np.log(s), 1)[0])


def growth_exponent(sizes, values) -> float:
    """Slope of ``log value`` against ``log size``; 0 for fewer than two usable points."""
    sizes = np.asarray(sizes, dtype=float)
    values = np.asarray(values, dtype=float)
    ok = np.isfinite(values) & (values > 0)
    if ok.sum() < 2:
        return 0.0
    return float(np.polyfit(np.log(sizes[ok]), np.log(values[ok]), 1)[0])


def default_r_grid(A: BlockOperator, epsilon: float, kmax: int = 10) -> list[complex]:
    s = 1.0 + A.norm
    reals = [epsilon, 0.0, -0.5, -1.0] + [-(2.0**k) * s for k in range(kmax + 1)]
    imags = [0.0] + [sgn * (2.0**j) * s for j in range(0, kmax + 1, 2) for sgn in (1, -1)]
    return [complex(r, i) for r in reals for i in imags]


def _ray(A: BlockOperator, kmax: int = 12) -> list[complex]:
    return [complex(-(2.0**k) * (1.0 + A.norm)) for k in range(kmax + 1)]


def check_thm31_hypotheses(
    A_or_family,
    alpha: float = 0.5,
    epsilon: float = 0.1,
    decay_threshold: float = -0.5,
    growth_tol: float = 0.25,
    epsilons=DEFAULT_EPSILONS,
    mu0=None,
) -> HypothesisVerdict:
    """Check the three alternative conditions for a type-zero C0 restriction.

    (i) ``A12`` compact: singular values decay (fitted exponent below
    ``decay_threshold``) with bounded leading value across a family.
    (ii) ``R(mu)`` bounded on a sampled ``{Re mu <= epsilon}`` and ``G(mu) -> 0``
    along the ray; across a family, no growth in the R supremum.
    (iii) ``-A22`` quasi-holomorphic and the fractional-power pair bounded.
    The verdict passes when the operator is J-dissipative and any one holds.
    The decay of ``G`` is reported at ``mu0``, defaulting to the family's
    own reference point when it records one and to ``choose_mu`` otherwise.
    """
    from .riccati import choose_mu
    from .transfer import envelope, eval_transfer, pair_norms

    members = _members(A_or_family)
    if mu0 is None:
        mu0 = getattr(A_or_family, "description", {}).get("mu0")
    sizes = [M.structure.n for M in members]
    verdicts = [check_dissipativity(M) for M in members]
    dissipative = all(v.j_dissipative for v in verdicts)
    margin = min(v.uniform_margin for v in verdicts)

    # (i)
    s1, exps, ranks, g_exps = [], [], [], []
    for M in members:
        sv = np.linalg.svd(M.A12, compute_uv=False)
        s1.append(float(sv[0]) if sv.size else 0.0)
        ranks.append(int(np.sum(sv > 1e-8 * sv[0])) if sv.size and sv[0] > 0 else 0)
        exps.append(decay_exponent(sv))
        try:
            mu_g = choose_mu(M)[0] if mu0 is None else mu0
            g_exps.append(decay_exponent(np.linalg.svd(eval_transfer(M, mu_g).G, compute_uv=False)))
        except KreinError:
            g_exps.append(math.nan)
    if s1[-1] == 0.0:
        ok_i = True
    else:
        ok_i = exps[-1] <= decay_threshold and s1[-1] <= 2.0 * max(s1[0], 1e-300)
    cond_i = ConditionVerdict(
        ok_i, {"sigma_max": s1, "numerical_rank": ranks, "decay_exponent": exps, "g_decay_exponent": g_exps}
    )

    # (ii)
    r_sups, g_first, g_last, skipped = [], [], [], []
    for M in members:
        env = envelope(M, default_r_grid(M, epsilon))
        valid = env.valid()
        skipped.append(len(env.samples) - len(valid))
        r_sups.append(max((s.r_norm for s in valid), default=math.inf))
        ray = envelope(M, _ray(M)).valid()
        g_first.append(ray[0].g_norm if ray else math.inf)
        g_last.append(ray[-1].g_norm if ray else math.inf)
    thr = FINITE_FACTOR * (1.0 + max(M.norm for M in members))
    g_decays = all(gl <= 0.1 * gf or gf == 0.0 for gf, gl in zip(g_first, g_last))
    r_growth = growth_exponent(sizes, r_sups) if len(members) > 1 else 0.0
    ok_ii = all(r < thr for r in r_sups) and g_decays and r_growth <= growth_tol
    cond_ii = ConditionVerdict(
        ok_ii,
        {"r_sup": r_sups, "r_growth_exponent": r_growth, "g_ray_first": g_first, "g_ray_last": g_last, "skipped": skipped},
    )

    # (iii)
    quasi_ok, pairs, err = [], [], None
    for M in members:
        quasi_ok.append(is_quasi_holomorphic(-M.A22, epsilons))
        try:
            pairs.append(pair_norms(M, alpha))
        except (BranchCutError, NotDiagonalizableError) as exc:
            pairs.append((math.inf, math.inf))
            err = exc.code
    pair_max = [max(p) for p in pairs]
    p_growth = growth_exponent(sizes, pair_max) if len(members) > 1 else 0.0
    ok_iii = all(quasi_ok) and all(p < thr for p in pair_max) and p_growth <= growth_tol
    detail = {"minus_a22_quasi_holomorphic": quasi_ok, "pair_norms": pairs, "pair_growth_exponent": p_growth}
    if err:
        detail["error"] = err
    cond_iii = ConditionVerdict(ok_iii, detail)

    passed = dissipative and (ok_i or ok_ii or ok_iii)
    if not passed:
        prediction = "none"
    elif margin > 0:
        prediction = "exponentially_stable"
    else:
        prediction = "c0_type_zero"
    return HypothesisVerdict(
        conditions={"i": cond_i, "ii": cond_ii, "iii": cond_iii},
        dissipative=dissipative,
        uniform_margin=margin,
        passed=passed,
        prediction=prediction,
    )


def check_thm32_hypotheses(A: BlockOperator, mu, alpha0, epsilons=DEFAULT_EPSILONS, cross_check: bool = True) -> HypothesisVerdict:
    """Check the two alternative conditions for a quasi-holomorphic restriction.

    (i) ``S(mu)`` quasi-holomorphic.  (ii) ``A11`` quasi-holomorphic and
    ``A21 (A11 - alpha0)^-1`` bounded.  With ``cross_check`` the angle
    operator is solved and ``classify(X)`` is run on the restriction.
    """
    from .riccati import restriction, solve_angle
    from .transfer import eval_transfer

    alpha0 = complex(alpha0)
    p = A.n_plus
    shifted = A.A11 - alpha0 * np.eye(p)
    if not sigma_min(shifted) > 1e-12 * max(1.0, norm2(A.A11)):
        raise Alpha0InSpectrumError(f"alpha0={alpha0!r} is in the spectrum of A11")
    ev = eval_transfer(A, mu)
    verdict = check_dissipativity(A)

    s_quasi = quasi_holomorphic_table(ev.S, epsilons)
    thr_s = finite_threshold(ev.S)
    ok_i = all(c < thr_s for _, c in s_quasi)
    cond_i = ConditionVerdict(ok_i, {"quasi_holomorphic": s_quasi})

    a_quasi = quasi_holomorphic_table(A.A11, epsilons)
    thr_a = finite_threshold(A.A11)
    coupling = norm2(np.linalg.solve(shifted.T, A.A21.T).T)
    ok_ii = all(c < thr_a for _, c in a_quasi) and coupling < thr_a
    cond_ii = ConditionVerdict(ok_ii, {"quasi_holomorphic": a_quasi, "a21_resolvent_norm": coupling})

    passed = verdict.j_dissipative and (ok_i or ok_ii)
    cross = {}
    if cross_check and verdict.j_dissipative:
        try:
            outcome = solve_angle(A)
            rep = restriction(A, outcome.angle, mu)
            sg = classify(rep.X)
            cross = {
                "solver": outcome.solver,
                "classification": sg.classification,
                "labels": sg.labels,
                "quasi_holomorphic": sg.quasi_holomorphic,
                "confirmed": "quasi_holomorphic" in sg.labels,
            }
        except KreinError as exc:
            cross = {"error": exc.code, "confirmed": False}
    return HypothesisVerdict(
        conditions={"i": cond_i, "ii": cond_ii},
        dissipative=verdict.j_dissipative,
        uniform_margin=verdict.uniform_margin,
        passed=passed,
        prediction="quasi_holomorphic" if passed else "none",
        cross_check=cross,
    )
