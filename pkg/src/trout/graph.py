"""Fusion weight graphs over observations and the signed incidence operator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse

from .registration import trout_pairwise

__all__ = ["UnionFind", "WeightGraph", "knn_gaussian_weights", "build_incidence"]

WEIGHT_METRICS = ("trout", "euclidean")


class UnionFind:
    """Disjoint sets over 0..n-1 with path compression."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.n_components = n

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> bool:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        if rj < ri:
            ri, rj = rj, ri
        self.parent[rj] = ri
        self.n_components -= 1
        return True


@dataclass(frozen=True)
class WeightGraph:
    """Weighted edge list (i < j, positive weights) over n observations.

    The graph must be connected so that a large enough fusion penalty can
    merge everything into a single cluster.
    """

    edges: tuple
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one node")
        edges = tuple((int(i), int(j), float(w)) for i, j, w in self.edges)
        seen = set()
        uf = UnionFind(self.n)
        for i, j, w in edges:
            if not (0 <= i < j < self.n):
                raise ValueError(f"invalid edge ({i}, {j}) for n = {self.n}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            if not (w > 0 and np.isfinite(w)):
                raise ValueError(f"edge ({i}, {j}) has non-positive weight {w}")
            seen.add((i, j))
            uf.union(i, j)
        if uf.n_components != 1:
            raise ValueError("weight graph is not connected")
        object.__setattr__(self, "edges", edges)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def weight_vector(self) -> np.ndarray:
        return np.array([w for _, _, w in self.edges], dtype=float)


def _euclidean_pairwise(X: np.ndarray) -> np.ndarray:
    gram = X @ X.conj().T
    sq = np.real(np.diag(gram))
    d2 = sq[:, None] + sq[None, :] - 2.0 * np.real(gram)
    upper = np.sqrt(np.maximum(np.triu(d2, k=1), 0.0))
    return upper + upper.T


def knn_gaussian_weights(X, k: int = 5, phi: float | None = None,
                         metric: str = "trout") -> WeightGraph:
    """Symmetrized k-nearest-neighbor graph with Gaussian kernel weights.

    An edge (i, j) is included when either endpoint is among the other's k
    nearest neighbors; its weight is exp(-phi * d(X_i, X_j)^2). When ``phi``
    is None it is set by the median heuristic 1 / median(d^2) over the k-NN
    edges. If the k-NN graph is disconnected, minimum-distance edges joining
    the components are added (same kernel weight) until it is connected.
    """
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need a 2-D matrix with at least two rows")
    n = X.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < n, got k = {k}, n = {n}")
    if metric not in WEIGHT_METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    dm = trout_pairwise(X) if metric == "trout" else _euclidean_pairwise(X)

    pairs = set()
    for i in range(n):
        order = [j for j in np.argsort(dm[i], kind="stable") if j != i]
        for j in order[:k]:
            pairs.add((min(i, j), max(i, j)))

    if phi is None:
        med = float(np.median([dm[i, j] ** 2 for i, j in pairs]))
        phi = 0.0 if med == 0 else 1.0 / med
    elif phi < 0:
        raise ValueError("phi must be nonnegative")

    uf = UnionFind(n)
    for i, j in pairs:
        uf.union(i, j)
    while uf.n_components > 1:
        roots = np.array([uf.find(i) for i in range(n)])
        blocked = roots[:, None] == roots[None, :]
        masked = np.where(blocked, np.inf, dm)
        i, j = np.unravel_index(int(np.argmin(masked)), masked.shape)
        pairs.add((min(i, j), max(i, j)))
        uf.union(int(i), int(j))

    # floor keeps far-apart joining edges strictly positive, so a finite
    # penalty level can still fuse everything into one cluster
    edges = [
        (i, j, float(max(np.exp(-phi * dm[i, j] ** 2), 1e-12)))
        for i, j in sorted(pairs)
    ]
    return WeightGraph(tuple(edges), n)


def build_incidence(graph: WeightGraph) -> scipy.sparse.csr_array:
    """Signed incidence operator: row l has +1 at i_l and -1 at j_l.

    Applying it to a centroid matrix stacks the pairwise differences
    U_i - U_j in the graph's edge order.
    """
    m = graph.n_edges
    rows = np.repeat(np.arange(m), 2)
    cols = np.array([[i, j] for i, j, _ in graph.edges], dtype=int).reshape(-1) \
        if m else np.empty(0, dtype=int)
    data = np.tile([1.0, -1.0], m)
    return scipy.sparse.csr_array(
        (data, (rows, cols)), shape=(m, graph.n), dtype=float
    )
