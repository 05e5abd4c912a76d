import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg

from krein.core import BlockOperator
from krein.errors import Alpha0InSpectrumError, OverflowAtLargeTError, SpectrumInHalfPlaneError
from krein.family import growing_coupling, structured_family
from krein.semigroup import (
    check_thm31_hypotheses,
    check_thm32_hypotheses,
    classify,
    compact_perturbation_radius,
    decay_exponent,
    expm_type,
    fmp_check,
    gearhart_line,
    gearhart_sup,
    gearhart_type,
    gomilko_functional,
    gomilko_worst_basis,
    holomorphic_bound,
    numerical_range_sector,
    resolvent_norm,
)


def normal_matrix(rng, eigs):
    n = len(eigs)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return Q @ np.diag(eigs) @ Q.conj().T


def lyapunov_gomilko(T, omega, x, delta):
    """(delta - omega) * 2 pi x*(P + Q) x from the two Lyapunov equations."""
    n = T.shape[0]
    Ad = T - delta * np.eye(n)
    P = linalg.solve_continuous_lyapunov(Ad.conj().T, -np.eye(n))
    Q = linalg.solve_continuous_lyapunov(Ad, -np.eye(n))
    return (delta - omega) * 2 * np.pi * np.vdot(x, (P + Q) @ x).real


class TestResolvent:
    def test_diag(self):
        assert resolvent_norm(np.diag([-1.0, -2.0]), 0) == pytest.approx(1.0)

    def test_scalar(self):
        assert resolvent_norm([[-1.0]], 1.0) == pytest.approx(0.5)

    def test_nilpotent(self):
        expected = 1 / np.sqrt(3 - np.sqrt(8))
        assert resolvent_norm([[0, 2], [0, 0]], 1.0) == pytest.approx(expected, rel=1e-13)
        assert expected == pytest.approx(2.414, abs=1e-3)

    def test_singular(self):
        assert resolvent_norm([[-1.0]], -1.0) == math.inf


class TestGearhart:
    @pytest.mark.parametrize("T,beta,val", [(np.diag([-1.0, -2.0]), 0.0, 1.0), ([[-1.0]], -0.5, 2.0)])
    def test_examples(self, T, beta, val):
        assert gearhart_sup(T, beta) == pytest.approx(val, rel=1e-9)

    def test_line_between_eigenvalues(self):
        T = np.diag([-1.0, -2.0])
        assert gearhart_sup(T, -1.5, region="line") == pytest.approx(2.0, rel=1e-9)
        assert gearhart_sup(T, -1.5) == math.inf

    def test_spectrum_on_line(self):
        assert gearhart_sup(np.diag([0.0, -1.0]), 0.0) == math.inf

    @settings(max_examples=20, deadline=None)
    @given(st.integers(1, 6), st.floats(-3, 3), st.integers(0, 2**31))
    def test_normal_distance(self, n, beta, seed):
        r = np.random.default_rng(seed)
        w = beta - 0.05 - r.random(n) * 3 + 1j * r.standard_normal(n) * 5
        T = normal_matrix(r, w)
        expected = 1 / np.min(beta - w.real)
        assert gearhart_sup(T, beta) == pytest.approx(expected, rel=1e-3)

    def test_tail_radius_reported(self):
        ls = gearhart_line(np.array([[-1.0, 10.0], [0.0, -1.0]]), 0.0)
        assert ls.radius >= 2 * np.linalg.norm([[-1, 10], [0, -1]], 2)

    def test_type_bounds_abscissa(self, rng):
        for _ in range(5):
            T = rng.standard_normal((5, 5)) - 2 * np.eye(5)
            a = np.linalg.eigvals(T).real.max()
            assert gearhart_type(T) >= a - 1e-6


class TestHolomorphic:
    def test_scalar(self):
        assert holomorphic_bound([[-1.0]], 0.0) == pytest.approx(1.0, rel=1e-6)

    def test_rotated_scalar(self):
        # sup over y of |y| / |iy - a| for a = -1 + 100i is |a| / |Re a|
        val = holomorphic_bound([[-1 + 100j]], 0.0)
        assert val == pytest.approx(math.sqrt(10001), rel=1e-6)
        assert val == pytest.approx(100, rel=1e-4)

    def test_zero(self):
        assert holomorphic_bound([[0.0]], 0.5) == pytest.approx(1.0, rel=1e-8)

    def test_spectrum_in_half_plane(self):
        with pytest.raises(SpectrumInHalfPlaneError):
            holomorphic_bound([[1.0]], 0.5)


class TestFMP:
    def test_scalar(self):
        assert fmp_check([[-1.0]], 0.0) == pytest.approx(1.0)

    def test_normal(self):
        assert fmp_check(np.diag([-1.0, -2.0]), 0.0) == pytest.approx(1.0)

    def test_jordan_single_point(self):
        T = np.array([[0.0, 2.0], [0.0, 0.0]]) - 3 * np.eye(2)
        direct = np.linalg.norm(np.linalg.inv(T - np.eye(2)), 2)
        assert fmp_check(T, 0.0, n_max=1, lambda_grid=[1.0]) == pytest.approx(max(1.0, direct))

    def test_nonnormal_exceeds_one(self):
        T = np.array([[-1.0, 10.0], [0.0, -1.0]])
        lam = 0.5
        direct = max(np.linalg.norm(np.linalg.matrix_power(lam * np.linalg.inv(T - lam * np.eye(2)), n), 2) for n in range(1, 6))
        assert fmp_check(T, 0.0, n_max=5, lambda_grid=[lam]) == pytest.approx(direct, rel=1e-12)
        assert direct > 1

    def test_grid_must_exceed_omega(self):
        with pytest.raises(ValueError):
            fmp_check([[-1.0]], 0.0, lambda_grid=[-0.5])


class TestGomilko:
    @pytest.mark.parametrize("delta", [1.0, 10.0, 100.0, 1e3])
    def test_scalar_closed_form(self, delta):
        (val,) = gomilko_functional([[-1.0]], 0.0, [1.0], [delta])
        assert val == pytest.approx(2 * np.pi * delta / (delta + 1), rel=1e-8)

    def test_decoupled(self):
        (val,) = gomilko_functional(-np.eye(2), 0.0, [1.0, 0.0], [1.0])
        assert val == pytest.approx(np.pi, rel=1e-8)

    def test_against_lyapunov(self, rng):
        T = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)) - 4 * np.eye(4)
        omega = np.linalg.eigvals(T).real.max() + 0.5
        x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        x /= np.linalg.norm(x)
        deltas = [omega + 0.3, omega + 5.0]
        got = gomilko_functional(T, omega, x, deltas)
        for d, g in zip(deltas, got):
            assert g == pytest.approx(lyapunov_gomilko(T, omega, x, d), rel=1e-7)

    def test_worst_basis_matches_quadrature(self, rng):
        T = rng.standard_normal((3, 3)) - 3 * np.eye(3)
        omega = np.linalg.eigvals(T).real.max() + 1
        quad = max(gomilko_functional(T, omega, e, [omega + 2])[0] for e in np.eye(3))
        assert gomilko_worst_basis(T, omega, omega + 2) == pytest.approx(quad, rel=1e-7)

    def test_bounded_for_contractions(self, rng):
        T = normal_matrix(rng, -rng.random(4) + 3j * rng.standard_normal(4))
        vals = [gomilko_worst_basis(T, 1.0, 1.0 + d) for d in (0.1, 1, 10, 100, 1000)]
        assert max(vals) <= 4 * np.pi

    def test_requires_unit_vector(self):
        with pytest.raises(ValueError):
            gomilko_functional([[-1.0]], 0.0, [2.0], [1.0])


class TestSector:
    def test_negative_real(self):
        assert numerical_range_sector(np.diag([-1.0, -2.0])) == (pytest.approx(-1.0), 0.0)

    def test_nilpotent(self):
        a, alpha = numerical_range_sector([[0, 2], [0, 0]])
        assert a == pytest.approx(1.0) and alpha is None

    def test_quarter(self):
        a, alpha = numerical_range_sector(-np.eye(2) + np.array([[0, 1], [-1, 0]]))
        assert a == pytest.approx(-1.0) and alpha == pytest.approx(np.pi / 4, abs=1e-10)


class TestExpm:
    def test_diag(self):
        assert expm_type(np.diag([-1.0, -2.0])) == pytest.approx(-1.0, abs=1e-6)

    def test_zero(self):
        assert expm_type([[0.0]]) == pytest.approx(0.0, abs=1e-12)

    def test_jordan(self):
        assert expm_type([[-1.0, 10.0], [0.0, -1.0]], np.linspace(10, 50, 64)) == pytest.approx(-1.0, abs=0.05)

    def test_underflow(self):
        with pytest.raises(OverflowAtLargeTError):
            expm_type([[-1e3]])


class TestClassify:
    def test_diag(self):
        rep = classify(np.diag([-1.0, -2.0]))
        assert rep.classification == "exponentially_stable"
        assert "holomorphic" in rep.labels

    def test_shifted_skew(self, rng):
        B = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        T = -np.eye(4) + 20 * (B - B.conj().T)
        rep = classify(T)
        assert "quasi_holomorphic" in rep.labels
        assert rep.exp_type_spectral == pytest.approx(-1.0, abs=1e-10)
        assert rep.exp_type_gearhart == pytest.approx(-1.0, abs=1e-3)
        assert rep.exp_type_curve == pytest.approx(-1.0, abs=0.05)

    def test_type_zero(self, rng):
        T = normal_matrix(rng, [0.0, -1.0 + 2j, -2.0])
        rep = classify(T)
        assert rep.classification == "c0_type_zero"
        assert "exponentially_stable" not in rep.labels

    def test_expansive(self):
        rep = classify(np.diag([0.5, -1.0]))
        assert rep.classification == "c0_general"


class TestCompactPerturbation:
    def test_radius_found(self, rng):
        B = rng.standard_normal((5, 5))
        T = (B - B.T) - np.diag(rng.random(5))
        V = 3 * rng.standard_normal((5, 5))
        r, outer = compact_perturbation_radius(T, V, 0.5)
        assert 0 < r < outer


class TestThm31:
    def test_decoupled_passes(self):
        A = BlockOperator.from_blocks(-np.eye(2), np.zeros((2, 3)), np.zeros((3, 2)), np.diag([1.0, 2.0, 3.0]))
        v = check_thm31_hypotheses(A)
        assert all(c.passed for c in v.conditions.values())
        assert v.prediction == "exponentially_stable"

    def test_family_decay(self):
        fam = structured_family([8, 16, 32], seed=0)
        v = check_thm31_hypotheses(fam)
        assert v.conditions["i"].passed
        assert v.conditions["i"].detail["g_decay_exponent"][-1] == pytest.approx(-2.0, abs=0.2)

    def test_growing_r_fails(self):
        v = check_thm31_hypotheses(growing_coupling([8, 16, 32, 64]))
        assert not v.conditions["ii"].passed
        assert v.conditions["ii"].detail["r_growth_exponent"] > 0.25

    def test_decay_exponent(self):
        assert decay_exponent(np.arange(1, 30.0) ** -2) == pytest.approx(-2.0, abs=1e-12)
        assert decay_exponent([0.0, 0.0]) == -math.inf


class TestThm32:
    def test_sectorial_passes(self):
        A = structured_family([8], a11="sectorial", seed=2).members[0]
        v = check_thm32_hypotheses(A, -1.0, 1.0)
        assert v.passed and v.cross_check["confirmed"]

    def test_unstable_a11_fails(self):
        A = BlockOperator.from_blocks([[0.5]], [[0.0]], [[0.0]], [[1.0]])
        v = check_thm32_hypotheses(A, -1.0, 1.0)
        assert not v.passed and v.prediction == "none"

    def test_decoupled_condition_ii(self):
        A = BlockOperator.from_blocks(-np.diag([1.0, 2.0]), np.zeros((2, 1)), np.zeros((1, 2)), [[1.0]])
        v = check_thm32_hypotheses(A, -1.0, 1.0, cross_check=False)
        assert v.conditions["ii"].passed
        assert v.conditions["ii"].detail["a21_resolvent_norm"] == 0.0

    def test_alpha0_in_spectrum(self):
        A = BlockOperator.from_blocks([[1.0]], [[0.0]], [[0.0]], [[1.0]])
        with pytest.raises(Alpha0InSpectrumError):
            check_thm32_hypotheses(A, -1.0, 1.0)
