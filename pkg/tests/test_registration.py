"""Phase registration against grid-search and numeric minimization oracles."""

import numpy as np
import pytest
from scipy.optimize import minimize

from trout.registration import (
    align_phase,
    align_rows,
    frechet_mean,
    relaxed_align,
    trout_distance,
    trout_distance_matrix,
    trout_pairwise,
)


def grid_min_distance(u, x, n_angles):
    """Direct grid search over rotation angles, no closed forms involved."""
    best = np.inf
    thetas = np.arange(n_angles) * (2 * np.pi / n_angles)
    for chunk in np.array_split(thetas, max(1, n_angles // 4096)):
        d = np.linalg.norm(u[None, :] - np.exp(1j * chunk)[:, None] * x[None, :], axis=1)
        best = min(best, float(d.min()))
    return best


def rand_cvec(rng, p):
    return rng.normal(size=p) + 1j * rng.normal(size=p)


class TestAlignPhase:
    def test_self_alignment(self):
        u = rand_cvec(np.random.default_rng(0), 6)
        a = align_phase(u, u)
        assert a.z == pytest.approx(1.0)
        assert not a.degenerate

    def test_pure_rotation(self):
        u = rand_cvec(np.random.default_rng(1), 5)
        a = align_phase(u, np.exp(1j * np.pi / 3) * u)
        assert abs(a.z - np.exp(-1j * np.pi / 3)) < 1e-12

    def test_unit_modulus(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            a = align_phase(rand_cvec(rng, 4), rand_cvec(rng, 4))
            assert abs(abs(a.z) - 1.0) <= 1e-12

    def test_matches_grid_search(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            u, x = rand_cvec(rng, 8), rand_cvec(rng, 8)
            z = align_phase(u, x).z
            grid = grid_min_distance(u, x, 2**20)
            assert abs(np.linalg.norm(u - z * x) - grid) < 1e-5

    def test_degenerate_orthogonal(self):
        a = align_phase(np.array([1.0 + 0j, 0]), np.array([0, 1.0 + 0j]))
        assert a.z == 1.0 and a.degenerate

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            align_phase(np.zeros(3, complex), np.zeros(4, complex))


class TestDistance:
    def test_zero_on_self(self):
        u = rand_cvec(np.random.default_rng(4), 7)
        assert trout_distance(u, u) == 0.0

    def test_orthogonal_tie_break(self):
        u = np.array([1.0 + 0j, 0.0])
        x = np.array([0.0, 1.0 + 0j])
        assert trout_distance(u, x) == pytest.approx(np.sqrt(2))

    def test_matches_grid_search(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            u, x = rand_cvec(rng, 8), rand_cvec(rng, 8)
            assert abs(trout_distance(u, x) - grid_min_distance(u, x, 2**16)) < 1e-5

    def test_symmetry(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            u, x = rand_cvec(rng, 5), rand_cvec(rng, 5)
            assert abs(trout_distance(u, x) - trout_distance(x, u)) <= 1e-12

    def test_rotation_invariance(self):
        rng = np.random.default_rng(7)
        u, x = rand_cvec(rng, 6), rand_cvec(rng, 6)
        d0 = trout_distance(u, x)
        for a, b in ((0.3, 1.1), (2.0, -0.7)):
            d = trout_distance(np.exp(1j * a) * u, np.exp(1j * b) * x)
            assert abs(d - d0) <= 1e-12

    def test_dominated_by_euclidean(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            u, x = rand_cvec(rng, 4), rand_cvec(rng, 4)
            assert trout_distance(u, x) <= np.linalg.norm(u - x) + 1e-12

    def test_alignment_beats_random_rotations(self):
        rng = np.random.default_rng(9)
        u, x = rand_cvec(rng, 6), rand_cvec(rng, 6)
        d = trout_distance(u, x)
        thetas = rng.uniform(0, 2 * np.pi, size=10_000)
        cand = np.linalg.norm(u[None, :] - np.exp(1j * thetas)[:, None] * x[None, :], axis=1)
        assert np.all(d <= cand + 1e-12)

    def test_triangle_inequality_holds_on_orbit_quotient(self):
        # The rotation group acts by isometries, so the orbit distance is a
        # genuine pseudometric: a random search finds no violating triple.
        # What fails is definiteness: distinct vectors on the same orbit are
        # at distance zero.
        rng = np.random.default_rng(10)
        for _ in range(20_000):
            a, b, c = (rand_cvec(rng, 2) for _ in range(3))
            assert trout_distance(a, c) <= (
                trout_distance(a, b) + trout_distance(b, c) + 1e-9
            )
        v = rand_cvec(rng, 3)
        w = np.exp(1j * 0.9) * v
        assert not np.allclose(v, w)
        assert trout_distance(v, w) < 1e-12


class TestMatrixDistance:
    def test_zero_on_equal(self):
        rng = np.random.default_rng(11)
        U = rng.normal(size=(4, 3)) + 1j * rng.normal(size=(4, 3))
        assert trout_distance_matrix(U, U) == 0.0

    def test_zero_on_rowwise_rotations(self):
        rng = np.random.default_rng(12)
        U = rng.normal(size=(5, 4)) + 1j * rng.normal(size=(5, 4))
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=5))
        assert trout_distance_matrix(U, phases[:, None] * U) < 1e-12

    def test_matches_rowwise_grid_search(self):
        rng = np.random.default_rng(13)
        U = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
        X = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
        want = np.sqrt(sum(grid_min_distance(U[i], X[i], 2**16) ** 2 for i in range(3)))
        assert abs(trout_distance_matrix(U, X) - want) < 1e-5

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            trout_distance_matrix(np.zeros((2, 3), complex), np.zeros((3, 2), complex))


class TestAlignRows:
    def test_identity_on_equal(self):
        rng = np.random.default_rng(14)
        U = rng.normal(size=(4, 3)) + 1j * rng.normal(size=(4, 3))
        assert np.allclose(align_rows(U, U), U, atol=1e-14)

    def test_recovers_rotated_rows(self):
        rng = np.random.default_rng(15)
        U = rng.normal(size=(4, 3)) + 1j * rng.normal(size=(4, 3))
        X = np.exp(1j * rng.uniform(0, 2 * np.pi, size=4))[:, None] * U
        assert np.max(np.abs(align_rows(X, U) - U)) < 1e-12

    def test_residual_equals_distance(self):
        rng = np.random.default_rng(16)
        U = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
        X = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
        aligned = align_rows(X, U)
        for i in range(3):
            assert abs(np.linalg.norm(U[i] - aligned[i]) - trout_distance(U[i], X[i])) < 1e-10

    def test_norm_preserved(self):
        rng = np.random.default_rng(17)
        U = rng.normal(size=(4, 5)) + 1j * rng.normal(size=(4, 5))
        X = rng.normal(size=(4, 5)) + 1j * rng.normal(size=(4, 5))
        aligned = align_rows(X, U)
        assert np.max(np.abs(np.linalg.norm(aligned, axis=1) - np.linalg.norm(X, axis=1))) < 1e-12


class TestPairwise:
    def test_matches_scalar_distance(self):
        rng = np.random.default_rng(18)
        X = rng.normal(size=(6, 5)) + 1j * rng.normal(size=(6, 5))
        dm = trout_pairwise(X)
        assert np.array_equal(dm, dm.T)
        assert np.all(np.diag(dm) == 0)
        for i in range(6):
            for j in range(i + 1, 6):
                assert abs(dm[i, j] - trout_distance(X[i], X[j])) < 1e-8


class TestRelaxedAlign:
    def test_identity(self):
        u = rand_cvec(np.random.default_rng(19), 5)
        assert relaxed_align(u, u) == pytest.approx(1.0)

    def test_scaling(self):
        u = rand_cvec(np.random.default_rng(20), 5)
        assert relaxed_align(u, 2 * u) == pytest.approx(0.5)

    def test_matches_numeric_least_squares(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            u, x = rand_cvec(rng, 6), rand_cvec(rng, 6)
            z = relaxed_align(u, x)

            def resid(v):
                return np.linalg.norm(u - (v[0] + 1j * v[1]) * x)

            res = minimize(resid, np.zeros(2), method="Nelder-Mead",
                           options=dict(xatol=1e-12, fatol=1e-14, maxiter=10_000))
            assert abs(np.linalg.norm(u - z * x) - res.fun) < 1e-8

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            relaxed_align(np.ones(3, complex), np.zeros(3, complex))


class TestFrechetMean:
    def test_single_vector(self):
        u = rand_cvec(np.random.default_rng(22), 4)
        assert np.max(np.abs(frechet_mean([u]) - u)) < 1e-12

    def test_common_orbit(self):
        u = rand_cvec(np.random.default_rng(23), 4)
        m = frechet_mean([u, np.exp(1j * 1.2) * u])
        assert trout_distance(m, u) < 1e-10
        assert trout_distance(m, np.exp(1j * 1.2) * u) < 1e-10

    def test_matches_multistart_minimizer(self):
        rng = np.random.default_rng(42)
        rows = [rand_cvec(rng, 4) for _ in range(5)]
        m = frechet_mean(rows)
        got = sum(trout_distance(m, r) ** 2 for r in rows)
        M = np.array(rows)
        base = float(np.sum(np.abs(M) ** 2))

        def objective(v):
            mm = v[:4] + 1j * v[4:]
            return base + 5 * float(np.vdot(mm, mm).real) - 2 * float(
                np.sum(np.abs(np.conj(M) @ mm))
            )

        best = np.inf
        for k in range(100):
            x0 = np.random.default_rng(k).normal(size=8) * 2
            best = min(best, minimize(objective, x0, method="L-BFGS-B").fun)
        assert got <= best + 1e-4

    def test_objective_nonincreasing(self):
        rng = np.random.default_rng(24)
        rows = [rand_cvec(rng, 3) for _ in range(6)]
        M = np.array(rows)
        norms = np.linalg.norm(M, axis=1)
        m = M[int(np.argmax(norms))].copy()
        prev = sum(trout_distance(m, r) ** 2 for r in rows)
        for _ in range(20):
            w = np.conj(M) @ m
            z = np.where(np.abs(w) > 0, w / np.abs(w), 1.0)
            m = (z[:, None] * M).mean(axis=0)
            cur = sum(trout_distance(m, r) ** 2 for r in rows)
            assert cur <= prev + 1e-12
            prev = cur

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            frechet_mean([])
