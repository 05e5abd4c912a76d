import numpy as np
import pytest

from krein.core import BlockOperator, check_dissipativity
from krein.errors import BadDimensionError, InvalidParamsError
from krein.family import (
    OperatorFamily,
    decoupled_family,
    galerkin_convergence,
    generate,
    random_strict,
    structured_family,
    trend_verdict,
    truncate,
)
from krein.riccati import riccati_residuals, solve_angle, solve_angle_spectral
from krein.transfer import eval_transfer


class TestGenerators:
    @pytest.mark.parametrize("seed", range(5))
    def test_random_strict_margin(self, seed):
        A = random_strict(1, 1, eps=1.0, seed=seed)
        assert check_dissipativity(A).uniform_margin >= 1.0 - 1e-10

    @pytest.mark.parametrize("eps", [0.1, 1.0, 3.0])
    def test_random_strict_margin_sizes(self, eps):
        A = random_strict(7, 4, eps=eps, seed=1, complex_entries=False)
        assert check_dissipativity(A).uniform_margin >= eps - 1e-10
        assert np.isrealobj(A.matrix.real)

    def test_deterministic(self):
        assert random_strict(3, 3, 1.0, seed=9) == random_strict(3, 3, 1.0, seed=9)
        assert random_strict(3, 3, 1.0, seed=9) != random_strict(3, 3, 1.0, seed=10)

    def test_neutral_block(self):
        A = generate("neutral", {"n_plus": 3, "n_minus": 3}, seed=0)
        M = A.matrix
        assert M[0, 3] == 1 and M[3, 0] == 1 and M[0, 0] == 0 and M[3, 3] == 0
        assert not M[0, [1, 2, 4, 5]].any() and not M[[1, 2, 4, 5], 0].any()
        angle, _, _ = solve_angle_spectral(A)
        assert angle.K[0, 0].real == pytest.approx(-1.0, abs=1e-10)

    def test_structured_roundtrip(self):
        fam = structured_family([8, 16, 32], q=1.0, decay=2.0, rho=0.5, mu0=-1.0, seed=3)
        N = 32
        k = np.arange(1, N + 1)
        g_norms = []
        for M in fam.members:
            ev = eval_transfer(M, -1.0)
            n = M.n_plus
            F0 = np.linalg.solve(M.A22 + np.eye(n), M.A21)
            np.testing.assert_allclose(ev.F, F0, atol=1e-10)
            np.testing.assert_allclose(ev.G, F0.conj().T, atol=1e-10)
            sv = np.linalg.svd(ev.G, compute_uv=False)
            assert np.all(sv <= 1.5 * k[:n] ** -2.0 + 1e-14)
            g_norms.append(sv[0])
        assert max(g_norms) - min(g_norms) <= 1e-3 * max(g_norms)

    def test_structured_dissipative_and_nested(self):
        fam = structured_family([4, 8, 12], margin=0.3, seed=1, reference_size=20)
        assert fam.is_nested()
        for M in fam.members:
            assert check_dissipativity(M).uniform_margin == pytest.approx(0.3, abs=1e-10)

    def test_invalid(self):
        with pytest.raises(InvalidParamsError):
            generate("nope", {})
        with pytest.raises(InvalidParamsError):
            generate("random_strict", {"n_plus": 0})
        with pytest.raises(InvalidParamsError):
            generate("random_strict", {"eps": -1})
        with pytest.raises(InvalidParamsError):
            generate("structured_family", {"margin": -1})

    def test_family_requires_increasing(self):
        A = random_strict(2, 2, 1.0, 0)
        with pytest.raises(InvalidParamsError):
            OperatorFamily({}, [A, A], nesting=False)


class TestTruncate:
    def test_full(self, sqrt13):
        assert truncate(sqrt13, 1) == sqrt13

    def test_decoupled(self):
        A = BlockOperator.from_blocks(np.triu(np.ones((3, 3))) - 3 * np.eye(3), np.zeros((3, 2)), np.zeros((2, 3)), np.eye(2))
        T = truncate(A, 2)
        np.testing.assert_array_equal(T.matrix, np.block([[A.A11[:2, :2], np.zeros((2, 2))], [np.zeros((2, 2)), np.eye(2)]]))
        np.testing.assert_allclose(np.sort(np.linalg.eigvals(T.A11).real), [-2, -2])

    @pytest.mark.parametrize("m", [0, 4, 1.5])
    def test_bad_m(self, m):
        with pytest.raises(BadDimensionError):
            truncate(random_strict(3, 2, 1.0, 0), m)

    def test_nested_consistency(self):
        # with vanishing tails the full K restricted to the leading block solves the truncation
        fam = decoupled_family([3, 6])
        small, big = fam.members
        K = solve_angle(big).angle.K
        res = riccati_residuals(small, K[:3, :3], -2.0)
        assert res.modified_ric2 <= 1e-8


class TestGalerkin:
    def test_decoupled_all_zero(self):
        rep = galerkin_convergence(decoupled_family([4, 8, 16], seed=1))
        assert rep.k_difference == [0.0, 0.0, 0.0]
        assert rep.surrogate == [0.0, 0.0, 0.0]

    def test_structured_surrogate_decreases(self):
        fam = structured_family([8, 16, 32], reference_size=64, seed=0)
        rep = galerkin_convergence(fam)
        assert rep.surrogate[-1] <= rep.surrogate[0] / 10
        assert rep.verdicts["surrogate"] == "monotone-decreasing"
        assert rep.verdicts["g_ray"] == "monotone-decreasing"

    def test_single_point(self):
        A = random_strict(3, 2, 1.0, 4)
        rep = galerkin_convergence((A, [3]))
        assert rep.k_difference[0] <= 1e-14
        assert rep.verdicts["k_difference"] == "insufficient points"

    def test_truncation_schedule(self):
        A = random_strict(5, 3, 1.0, 6)
        rep = galerkin_convergence((A, [2, 3, 5]))
        assert rep.sizes == [2, 3, 5] and rep.k_difference[-1] <= 1e-12

    @pytest.mark.parametrize(
        "values,verdict",
        [([3, 2, 1], "monotone-decreasing"), ([1, 1.5, 1.2], "bounded"), ([1, 3, 9], "growing"), ([1], "insufficient points")],
    )
    def test_trend(self, values, verdict):
        assert trend_verdict(values) == verdict
