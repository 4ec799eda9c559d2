"""Weight graph construction and the signed incidence operator."""

import numpy as np
import pytest

from trout.graph import UnionFind, WeightGraph, build_incidence, knn_gaussian_weights
from trout.registration import trout_distance


def components_oracle(n, pairs):
    """Independent union-find pass used to check connectivity claims."""
    uf = UnionFind(n)
    for i, j in pairs:
        uf.union(i, j)
    return uf.n_components


class TestWeightGraph:
    def test_valid(self):
        g = WeightGraph(((0, 1, 1.0), (1, 2, 0.5)), 3)
        assert g.n_edges == 2
        assert np.allclose(g.weight_vector(), [1.0, 0.5])

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            WeightGraph(((0, 1, 1.0), (0, 1, 2.0)), 2)

    def test_rejects_bad_order(self):
        with pytest.raises(ValueError):
            WeightGraph(((1, 0, 1.0),), 2)

    def test_rejects_nonpositive_weight(self):
        with pytest.raises(ValueError):
            WeightGraph(((0, 1, 0.0),), 2)

    def test_rejects_disconnected(self):
        with pytest.raises(ValueError):
            WeightGraph(((0, 1, 1.0), (2, 3, 1.0)), 4)

    def test_singleton_graph(self):
        g = WeightGraph((), 1)
        assert g.n_edges == 0


class TestKnnWeights:
    def test_two_points_single_edge(self):
        X = np.array([[1.0 + 0j, 0], [0, 2.0 + 0j]])
        g = knn_gaussian_weights(X, k=1, phi=0.3)
        assert len(g.edges) == 1
        i, j, w = g.edges[0]
        assert (i, j) == (0, 1)
        d = trout_distance(X[0], X[1])
        assert w == pytest.approx(np.exp(-0.3 * d**2))

    def test_phi_zero_unit_weights(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(8, 4)) + 1j * rng.normal(size=(8, 4))
        g = knn_gaussian_weights(X, k=2, phi=0.0)
        assert all(w == 1.0 for _, _, w in g.edges)

    def test_separated_triples_get_connected(self):
        rng = np.random.default_rng(1)
        blocks = []
        for c in range(3):
            center = 100.0 * c * (np.ones(4) + 1j)
            blocks.append(center[None, :] + 0.01 * rng.normal(size=(3, 4)))
        X = np.vstack(blocks)
        g = knn_gaussian_weights(X, k=2)
        assert components_oracle(g.n, [(i, j) for i, j, _ in g.edges]) == 1

    def test_k_out_of_range(self):
        X = np.zeros((4, 2), complex)
        for k in (0, 4, 7):
            with pytest.raises(ValueError):
                knn_gaussian_weights(X, k=k)

    def test_euclidean_metric(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(6, 3)) + 1j * rng.normal(size=(6, 3))
        g = knn_gaussian_weights(X, k=2, metric="euclidean", phi=0.0)
        assert components_oracle(g.n, [(i, j) for i, j, _ in g.edges]) == 1

    def test_lexicographic_edge_order(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(10, 3)) + 1j * rng.normal(size=(10, 3))
        g = knn_gaussian_weights(X, k=3)
        pairs = [(i, j) for i, j, _ in g.edges]
        assert pairs == sorted(pairs)

    def test_permutation_symmetry(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(9, 4)) + 1j * rng.normal(size=(9, 4))
        g = knn_gaussian_weights(X, k=3)
        perm = rng.permutation(9)
        gp = knn_gaussian_weights(X[perm], k=3)
        inv = np.argsort(perm)
        mapped = sorted(
            (min(perm[i], perm[j]), max(perm[i], perm[j]), round(w, 12))
            for i, j, w in gp.edges
        )
        original = sorted((i, j, round(w, 12)) for i, j, w in g.edges)
        assert mapped == original


class TestIncidence:
    def test_single_edge(self):
        D = build_incidence(WeightGraph(((0, 1, 1.0),), 2)).toarray()
        assert np.array_equal(D, [[1.0, -1.0]])

    def test_path_graph_laplacian(self):
        g = WeightGraph(((0, 1, 1.0), (1, 2, 1.0)), 3)
        D = build_incidence(g)
        L = (D.T @ D).toarray()
        want = np.array([[1.0, -1, 0], [-1, 2, -1], [0, -1, 1]])
        assert np.array_equal(L, want)

    def test_row_structure_and_zero_row_sums(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(12, 3)) + 1j * rng.normal(size=(12, 3))
        g = knn_gaussian_weights(X, k=3)
        D = build_incidence(g).toarray()
        assert np.all(D.sum(axis=1) == 0)
        assert np.all((D == 1).sum(axis=1) == 1)
        assert np.all((D == -1).sum(axis=1) == 1)
        L = D.T @ D
        assert np.max(np.abs(L.sum(axis=1))) == 0

    def test_laplacian_psd_with_ones_nullspace(self):
        rng = np.random.default_rng(6)
        X = rng.normal(size=(10, 3)) + 1j * rng.normal(size=(10, 3))
        g = knn_gaussian_weights(X, k=2)
        L = (build_incidence(g).T @ build_incidence(g)).toarray()
        eig = np.linalg.eigvalsh(L)
        assert eig[0] > -1e-12
        assert abs(eig[0]) < 1e-12  # ones vector
        assert eig[1] > 1e-12  # connected, so single zero eigenvalue

    def test_stacks_row_differences(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(6, 4)) + 1j * rng.normal(size=(6, 4))
        g = knn_gaussian_weights(X, k=2)
        D = build_incidence(g)
        DU = D @ X
        for l, (i, j, _) in enumerate(g.edges):
            assert np.allclose(DU[l], X[i] - X[j], atol=1e-14)
