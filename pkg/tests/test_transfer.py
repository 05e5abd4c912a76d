import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from krein.core import BlockOperator
from krein.errors import BranchCutError, InvalidParamsError, MuInSpectrumError
from krein.transfer import (
    default_mu_samples,
    envelope,
    eval_transfer,
    fractional_power,
    pair_norms,
)

from conftest import random_blocks


class TestEvalTransfer:
    def test_scalar(self, sqrt13):
        ev = eval_transfer(sqrt13, -1.0)
        assert ev.F[0, 0] == pytest.approx(1 / 3, abs=1e-15)
        assert ev.G[0, 0] == pytest.approx(1 / 3, abs=1e-15)
        assert ev.R[0, 0] == pytest.approx(1 / 3, abs=1e-15)
        assert ev.S[0, 0] == pytest.approx(-4 / 3, abs=1e-15)

    def test_decoupled(self, rng):
        A = random_blocks(rng, 3, 2).replace(A21=np.zeros((2, 3)))
        ev = eval_transfer(A, -1j)
        assert not ev.F.any() and not ev.R.any()
        np.testing.assert_array_equal(ev.S, A.A11)

    def test_diagonal_resolvent(self):
        A = BlockOperator.from_blocks([[0.0]], [[1.0, 1.0]], np.zeros((2, 1)), np.diag([-1.0, -2.0]))
        assert np.linalg.norm(eval_transfer(A, -5.0).G, 2) == pytest.approx(5 / 12, rel=1e-14)

    def test_mu_in_spectrum(self, sqrt13):
        with pytest.raises(MuInSpectrumError) as info:
            eval_transfer(sqrt13, 2.0)
        assert info.value.code == "mu_in_spectrum"

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
    def test_definitions(self, p, m, seed):
        r = np.random.default_rng(seed)
        A = random_blocks(r, p, m)
        mu = complex(-(1 + A.norm), r.standard_normal())
        ev = eval_transfer(A, mu)
        inv = np.linalg.inv(A.A22 - mu * np.eye(m))
        np.testing.assert_allclose(ev.F, inv @ A.A21, atol=1e-12 * A.scale)
        np.testing.assert_allclose(ev.G, A.A12 @ inv, atol=1e-12 * A.scale)
        np.testing.assert_allclose(ev.S, A.A11 - A.A12 @ inv @ A.A21, atol=1e-12 * A.scale)


class TestFractionalPower:
    def test_sqrt_diag(self):
        np.testing.assert_allclose(fractional_power(np.diag([1.0, 4.0]), 0.5), np.diag([1.0, 2.0]), atol=1e-15)

    def test_endpoints_exact(self, rng):
        M = np.eye(3) * 2 + 0.1 * rng.standard_normal((3, 3))
        np.testing.assert_array_equal(fractional_power(M, 0.0), np.eye(3))
        np.testing.assert_array_equal(fractional_power(M, 1.0), M)

    def test_semigroup_property(self, rng):
        M = np.eye(4) * 3 + 0.3 * (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
        a = fractional_power(M, 0.3) @ fractional_power(M, 0.7)
        np.testing.assert_allclose(a, M, atol=1e-12)

    def test_branch_cut(self):
        with pytest.raises(BranchCutError):
            fractional_power(np.diag([1.0, -1.0]), 0.5)

    def test_alpha_range(self):
        with pytest.raises(InvalidParamsError):
            fractional_power(np.eye(2), 1.5)


class TestPairNorms:
    def test_diagonal(self):
        A = BlockOperator.from_blocks([[0.0]], [[1.0, 1.0]], [[1.0], [1.0]], np.diag([-2.0, -5.0]))
        left, right = pair_norms(A, 0.5)
        assert left == pytest.approx(np.sqrt(5), rel=1e-14)
        assert right == pytest.approx(np.sqrt(5), rel=1e-14)

    def test_zero_coupling(self):
        A = BlockOperator.from_blocks([[0.0]], [[0.0, 0.0]], [[0.0], [0.0]], np.diag([-2.0, -5.0]))
        assert pair_norms(A, 0.5) == (0.0, 0.0)

    def test_alpha_zero(self, rng):
        A = random_blocks(rng, 2, 3).replace(A22=-np.diag([2.0, 3.0, 7.0]))
        left, right = pair_norms(A, 0.0)
        assert left == pytest.approx(np.linalg.norm(A.A12, 2), rel=1e-14)
        ref = np.linalg.norm((-A.A22 - np.eye(3)) @ A.A21, 2)
        assert right == pytest.approx(ref, rel=1e-14)

    def test_accretive_orientation(self):
        # A22 = diag(1, 4): powers taken on A22 + 1 with negated exponents
        A = BlockOperator.from_blocks([[-1.0]], [[1.0, 1.0]], [[1.0], [1.0]], np.diag([1.0, 4.0]))
        left, right = pair_norms(A, 0.5)
        expected = np.sqrt(1 / 2 + 1 / 5)
        assert left == pytest.approx(expected, rel=1e-14)
        assert right == pytest.approx(expected, rel=1e-14)


class TestEnvelope:
    def test_no_coupling(self, rng):
        A = random_blocks(rng, 2, 3).replace(A12=np.zeros((2, 3)))
        env = envelope(A, default_mu_samples(A, kmax=4))
        assert all(s.g_norm == 0 and s.r_norm == 0 for s in env.valid())

    def test_diagonal_ray(self):
        k = np.arange(1.0, 6.0)
        A = BlockOperator.from_blocks([[0.0]], np.ones((1, 5)), np.zeros((5, 1)), -np.diag(k))
        ts = np.array([6.0, 8.0, 16.0, 64.0, 1e3, 1e5])
        g = [s.g_norm for s in envelope(A, -ts).valid()]
        expected = [np.linalg.norm(1 / (t - k)) for t in ts]
        np.testing.assert_allclose(g, expected, rtol=1e-13)
        assert np.all(np.diff(g) < 0) and g[-1] < 1e-4

    @pytest.mark.parametrize("t", [1.0, 10.0, 100.0])
    def test_scalar_r(self, sqrt13, t):
        (s,) = envelope(sqrt13, [-t]).samples
        assert s.r_norm == pytest.approx(1 / (2 + t), rel=1e-14)

    def test_inadmissible_sample_flagged(self, sqrt13):
        env = envelope(sqrt13, [2.0, -1.0])
        assert env.samples[0].error == "mu_in_spectrum"
        assert len(env.valid()) == 1
