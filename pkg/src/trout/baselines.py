"""Baseline clusterers: banded DTW distance, distance matrices over five
time/frequency representations, and Lance-Williams agglomerative clustering."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .registration import trout_pairwise
from .spectral import TimeSeries, spectral_matrix

__all__ = [
    "dtw_distance",
    "pairwise_distances",
    "LinkageTree",
    "linkage_tree",
    "cut_tree",
    "hierarchical_cluster",
    "METRICS",
    "LINKAGES",
]

METRICS = ("euclid_time", "euclid_freq", "magnitude_freq", "dtw", "trout")
LINKAGES = ("average", "complete", "ward")


def _samples(ts) -> np.ndarray:
    if isinstance(ts, TimeSeries):
        return ts.values
    x = np.asarray(ts, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a 1-D signal")
    return x


@njit(cache=True)
def _dtw_cost(a, b, half_width):  # pragma: no cover - exercised via dtw_distance
    n = a.shape[0]
    acc = np.full((n + 1, n + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        lo = max(1, i - half_width)
        hi = min(n, i + half_width)
        for j in range(lo, hi + 1):
            d = a[i - 1] - b[j - 1]
            best = acc[i - 1, j - 1]
            if acc[i - 1, j] < best:
                best = acc[i - 1, j]
            if acc[i, j - 1] < best:
                best = acc[i, j - 1]
            acc[i, j] = d * d + best
    return acc[n, n]


def dtw_distance(a, b, window_frac: float = 0.10) -> float:
    """Dynamic time warping distance under a Sakoe-Chiba band.

    Warping paths are restricted to |i - j| <= ceil(window_frac * N); the
    local cost is the squared sample difference and the result is the square
    root of the optimal accumulated cost. A zero-width band leaves only the
    diagonal path, reproducing the Euclidean distance.
    """
    x = _samples(a)
    y = _samples(b)
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if not 0.0 <= window_frac <= 1.0:
        raise ValueError("window_frac must lie in [0, 1]")
    half_width = int(math.ceil(window_frac * x.size))
    return float(math.sqrt(_dtw_cost(x, y, half_width)))


def pairwise_distances(dataset, metric: str = "euclid_time", *,
                       window_frac: float = 0.10) -> np.ndarray:
    """Symmetric distance matrix over a dataset of equal-length series.

    Metrics: ``euclid_time`` on raw samples; ``euclid_freq`` on complex DFT
    coefficients; ``magnitude_freq`` between coefficient-modulus vectors
    (phase-oblivious); ``dtw`` with the banded warping above; ``trout`` as
    the registered spectral distance (phase-adaptive).
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    n = len(dataset)
    dm = np.zeros((n, n))
    if metric == "euclid_time":
        rows = np.vstack([_samples(ts) for ts in dataset]) if n else None
        for i in range(n):
            for j in range(i + 1, n):
                dm[i, j] = dm[j, i] = np.linalg.norm(rows[i] - rows[j])
    elif metric == "dtw":
        for i in range(n):
            for j in range(i + 1, n):
                dm[i, j] = dm[j, i] = dtw_distance(dataset[i], dataset[j],
                                                   window_frac)
    else:
        S = spectral_matrix(dataset)
        if metric == "trout":
            dm = trout_pairwise(S)
        elif metric == "euclid_freq":
            for i in range(n):
                for j in range(i + 1, n):
                    dm[i, j] = dm[j, i] = np.linalg.norm(S[i] - S[j])
        else:  # magnitude_freq
            mags = np.abs(S)
            for i in range(n):
                for j in range(i + 1, n):
                    dm[i, j] = dm[j, i] = np.linalg.norm(mags[i] - mags[j])
    return dm


def _check_distance_matrix(dm) -> np.ndarray:
    dm = np.asarray(dm, dtype=float)
    if dm.ndim != 2 or dm.shape[0] != dm.shape[1]:
        raise ValueError("distance matrix must be square")
    if not np.allclose(dm, dm.T, atol=1e-12):
        raise ValueError("distance matrix must be symmetric")
    if np.any(np.diag(dm) != 0):
        raise ValueError("distance matrix diagonal must be zero")
    if np.any(dm < 0):
        raise ValueError("distances must be nonnegative")
    return dm


@dataclass(frozen=True)
class LinkageTree:
    """Agglomerative merge history.

    ``merges`` holds n - 1 rows (id_a, id_b, height) with id_a < id_b;
    original observations are ids 0..n-1 and merge t creates id n + t.
    """

    merges: tuple
    n: int


def linkage_tree(dm, linkage: str = "average") -> LinkageTree:
    """Agglomerate under Lance-Williams updates with deterministic tie-breaks.

    Ties in the working distance break toward the smallest pair of cluster
    slots, where a cluster's slot is the smallest original index it contains.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}")
    dm = _check_distance_matrix(dm)
    n = dm.shape[0]
    # ward updates act on squared distances
    work = dm.astype(float) ** 2 if linkage == "ward" else dm.astype(float)
    np.fill_diagonal(work, np.inf)
    alive = np.ones(n, dtype=bool)
    ids = np.arange(n)
    sizes = np.ones(n)
    merges = []
    for step in range(n - 1):
        masked = np.where(np.outer(alive, alive), work, np.inf)
        np.fill_diagonal(masked, np.inf)
        i, j = np.unravel_index(int(np.argmin(masked)), masked.shape)
        if j < i:
            i, j = j, i
        height = math.sqrt(work[i, j]) if linkage == "ward" else work[i, j]
        merges.append((int(min(ids[i], ids[j])), int(max(ids[i], ids[j])),
                       float(height)))
        ni, nj = sizes[i], sizes[j]
        others = alive.copy()
        others[[i, j]] = False
        idx = np.nonzero(others)[0]
        if idx.size:
            if linkage == "average":
                merged = (ni * work[i, idx] + nj * work[j, idx]) / (ni + nj)
            elif linkage == "complete":
                merged = np.maximum(work[i, idx], work[j, idx])
            else:  # ward, on squared distances
                nk = sizes[idx]
                merged = ((ni + nk) * work[i, idx] + (nj + nk) * work[j, idx]
                          - nk * work[i, j]) / (ni + nj + nk)
            work[i, idx] = merged
            work[idx, i] = merged
        alive[j] = False
        sizes[i] = ni + nj
        ids[i] = n + step
    return LinkageTree(tuple(merges), n)


def cut_tree(tree: LinkageTree, k: int) -> np.ndarray:
    """Labels after merging down to exactly k clusters, numbered by smallest member."""
    n = tree.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}]")
    members = {i: [i] for i in range(n)}
    for step, (a, b, _) in enumerate(tree.merges):
        if len(members) == k:
            break
        members[n + step] = members.pop(a) + members.pop(b)
    labels = np.empty(n, dtype=int)
    groups = sorted(members.values(), key=min)
    for label, group in enumerate(groups):
        labels[group] = label
    return labels


def hierarchical_cluster(dm, linkage: str = "average", k: int = 1) -> np.ndarray:
    """Agglomerative clustering of a distance matrix, cut to exactly k clusters."""
    tree = linkage_tree(dm, linkage)
    return cut_tree(tree, k)
