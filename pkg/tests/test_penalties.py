"""Fusion penalty values and prox operators against numeric prox oracles."""

import math

import numpy as np
import pytest
from scipy.optimize import minimize

from trout.penalties import (
    PenaltyConfig,
    normalize_q,
    penalty_value,
    project_l1_ball,
    prox_matrix,
    prox_row,
)

QS = (1, 2, math.inf)


def rand_cvec(rng, p):
    return rng.normal(size=p) + 1j * rng.normal(size=p)


def prox_objective(x, v, tau, q):
    mods = np.abs(x)
    if q == 1:
        nq = mods.sum()
    elif q == 2:
        nq = np.sqrt((mods**2).sum())
    else:
        nq = mods.max() if mods.size else 0.0
    return tau * nq + 0.5 * float(np.sum(np.abs(x - v) ** 2))


def numeric_prox_value(v, tau, q):
    p = v.size

    def f(y):
        return prox_objective(y[:p] + 1j * y[p:], v, tau, q)

    starts = [np.concatenate([v.real, v.imag]), np.zeros(2 * p)]
    return min(minimize(f, s, method="L-BFGS-B").fun for s in starts)


class TestNormalizeQ:
    def test_accepted_spellings(self):
        assert normalize_q(1) == 1.0
        assert normalize_q(2.0) == 2.0
        assert normalize_q("inf") == math.inf
        assert normalize_q(np.inf) == math.inf

    def test_rejects_others(self):
        for bad in (0, 3, "fro", None):
            with pytest.raises((ValueError, TypeError)):
                normalize_q(bad)


class TestPenaltyValue:
    def test_zero_matrix(self):
        cfg = PenaltyConfig(2, np.ones(4))
        assert penalty_value(np.zeros((4, 3), complex), cfg) == 0.0

    def test_single_nonzero_entry_all_q(self):
        v = np.array([[3 + 4j, 0.0]])
        for q in QS:
            assert penalty_value(v, PenaltyConfig(q, np.ones(1))) == pytest.approx(5.0)

    def test_matches_direct_formula(self):
        rng = np.random.default_rng(0)
        V = rng.normal(size=(4, 3)) + 1j * rng.normal(size=(4, 3))
        w = rng.uniform(0.1, 2.0, size=4)
        mods = np.abs(V)
        direct = {
            1: float(w @ mods.sum(axis=1)),
            2: float(w @ np.sqrt((mods**2).sum(axis=1))),
            math.inf: float(w @ mods.max(axis=1)),
        }
        for q in QS:
            assert penalty_value(V, PenaltyConfig(q, w)) == pytest.approx(direct[q])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            penalty_value(np.zeros((3, 2), complex), PenaltyConfig(2, np.ones(4)))


class TestProxRow:
    def test_tau_zero_identity(self):
        rng = np.random.default_rng(1)
        v = rand_cvec(rng, 5)
        for q in QS:
            assert np.array_equal(prox_row(v, 0.0, q), v)

    def test_group_soft_threshold_values(self):
        out = prox_row(np.array([3.0 + 0j, 4.0 + 0j]), 2.5, 2)
        assert np.allclose(out, [1.5, 2.0], atol=1e-12)
        out = prox_row(np.array([0.3 + 0j, 0.4 + 0j]), 2.5, 2)
        assert np.all(out == 0)

    def test_linf_values(self):
        out = prox_row(np.array([3.0 + 0j, 1.0 + 0j]), 1.0, math.inf)
        assert np.allclose(out, [2.0, 1.0], atol=1e-12)
        out = prox_row(np.array([0.3 + 0j, 0.2 + 0j]), 1.0, math.inf)
        assert np.all(out == 0)

    def test_negative_tau_rejected(self):
        with pytest.raises(ValueError):
            prox_row(np.ones(2, complex), -0.1, 2)

    @pytest.mark.parametrize("q", QS)
    def test_beats_numeric_minimizer(self, q):
        rng = np.random.default_rng(2)
        for _ in range(25):
            v = rand_cvec(rng, 6)
            tau = float(rng.uniform(0.05, 3.0))
            out = prox_row(v, tau, q)
            assert prox_objective(out, v, tau, q) <= numeric_prox_value(v, tau, q) + 1e-8

    @pytest.mark.parametrize("q", QS)
    def test_beats_random_perturbations(self, q):
        rng = np.random.default_rng(3)
        v = rand_cvec(rng, 5)
        tau = 0.8
        out = prox_row(v, tau, q)
        base = prox_objective(out, v, tau, q)
        for _ in range(1000):
            cand = out + 0.1 * rand_cvec(rng, 5)
            assert base <= prox_objective(cand, v, tau, q) + 1e-12

    @pytest.mark.parametrize("q", QS)
    def test_firmly_nonexpansive(self, q):
        rng = np.random.default_rng(4)
        for _ in range(100):
            a, b = rand_cvec(rng, 4), rand_cvec(rng, 4)
            tau = float(rng.uniform(0, 2))
            pa, pb = prox_row(a, tau, q), prox_row(b, tau, q)
            assert np.linalg.norm(pa - pb) <= np.linalg.norm(a - b) + 1e-12

    @pytest.mark.parametrize("q", QS)
    def test_phase_equivariance(self, q):
        rng = np.random.default_rng(5)
        v = rand_cvec(rng, 5)
        tau = 0.6
        for theta in (0.4, 1.9, -2.5):
            lhs = prox_row(np.exp(1j * theta) * v, tau, q)
            rhs = np.exp(1j * theta) * prox_row(v, tau, q)
            assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_moreau_identity_linf(self):
        # prox is computed as v minus the projection, so the identity holds
        # up to one rounding of the re-addition
        rng = np.random.default_rng(6)
        for _ in range(50):
            v = rand_cvec(rng, 6)
            tau = float(rng.uniform(0.1, 4.0))
            out = prox_row(v, tau, math.inf)
            proj = project_l1_ball(v, tau)
            assert np.max(np.abs(out + proj - v)) <= 4 * np.finfo(float).eps * np.max(np.abs(v))


class TestProjectL1Ball:
    def test_inside_ball_unchanged(self):
        v = np.array([0.1 + 0.1j, 0.2])
        assert np.array_equal(project_l1_ball(v, 5.0), v)

    def test_radius_and_phases(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            v = rand_cvec(rng, 8)
            r = float(rng.uniform(0.1, 2.0))
            proj = project_l1_ball(v, r)
            if np.abs(v).sum() > r:
                assert abs(np.abs(proj).sum() - r) < 1e-9
            keep = np.abs(proj) > 0
            phases = np.angle(proj[keep]) - np.angle(v[keep])
            assert np.max(np.abs(phases)) < 1e-12


class TestProxMatrix:
    def test_zero_threshold_identity(self):
        rng = np.random.default_rng(8)
        V = rng.normal(size=(4, 3)) + 1j * rng.normal(size=(4, 3))
        cfg = PenaltyConfig(2, rng.uniform(0.5, 2, size=4))
        assert np.array_equal(prox_matrix(V, 0.0, cfg), V)

    def test_all_rows_below_threshold_vanish(self):
        V = 0.01 * (np.ones((3, 2)) + 1j)
        cfg = PenaltyConfig(2, np.ones(3))
        assert np.all(prox_matrix(V, 10.0, cfg) == 0)

    @pytest.mark.parametrize("q", QS)
    def test_rowwise_agreement(self, q):
        rng = np.random.default_rng(9)
        V = rng.normal(size=(5, 4)) + 1j * rng.normal(size=(5, 4))
        w = rng.uniform(0.0, 2.0, size=5)
        lam = 0.7
        cfg = PenaltyConfig(q, w)
        out = prox_matrix(V, lam, cfg)
        want = np.vstack([prox_row(V[l], lam * w[l], q) for l in range(5)])
        assert np.array_equal(out, want)
