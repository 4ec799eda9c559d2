"""Chance-corrected agreement between partitions."""

from __future__ import annotations

import numpy as np

__all__ = ["adjusted_rand_index"]


def adjusted_rand_index(a, b) -> float:
    """Adjusted Rand index between two partitions of the same items.

    Pair counting on the contingency table with the usual chance correction:
    (Index - Expected) / (Max - Expected). The degenerate case where Max
    equals Expected (both partitions trivial) returns 1.0 when the partitions
    are identical and 0.0 otherwise.
    """
    la = np.asarray(a).ravel()
    lb = np.asarray(b).ravel()
    if la.size != lb.size:
        raise ValueError(f"length mismatch: {la.size} vs {lb.size}")
    if la.size < 2:
        raise ValueError("need at least two items")
    _, ia = np.unique(la, return_inverse=True)
    _, ib = np.unique(lb, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)

    def comb2(m):
        return (m * (m - 1)) // 2

    index = int(np.sum(comb2(table)))
    sum_a = int(np.sum(comb2(table.sum(axis=1))))
    sum_b = int(np.sum(comb2(table.sum(axis=0))))
    total = comb2(int(la.size))
    expected = sum_a * sum_b / total
    maximum = (sum_a + sum_b) / 2
    if maximum == expected:
        one_per_row = np.all((table > 0).sum(axis=1) == 1)
        one_per_col = np.all((table > 0).sum(axis=0) == 1)
        return 1.0 if (one_per_row and one_per_col) else 0.0
    return float((index - expected) / (maximum - expected))
