"""Optimal global phase registration between complex spectra.

Registration finds the unit-modulus scalar z minimizing ||u - z x||_2; the
minimizer is the phase of the inner product x^H u, so both the alignment and
the induced distance are closed form. The distance is symmetric and invariant
to global rotations of either argument, but it does not satisfy the triangle
inequality, so downstream problems built on it are not convex in general.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhaseAlignment",
    "align_phase",
    "trout_distance",
    "trout_distance_matrix",
    "trout_pairwise",
    "align_rows",
    "relaxed_align",
    "frechet_mean",
]


@dataclass(frozen=True)
class PhaseAlignment:
    """Optimal unit-modulus rotation of one vector onto another.

    ``degenerate`` is set when the alignment was tie-broken (orthogonal
    inputs or a zero vector), in which case z = 1 so the registered distance
    reduces to the plain Euclidean one.
    """

    z: complex
    degenerate: bool = False


def _as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise ValueError("expected a 1-D complex vector")
    return v


def _as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValueError("expected a 2-D complex matrix")
    return m


def align_phase(u, x) -> PhaseAlignment:
    """Best unit-modulus z for rotating ``x`` onto ``u``.

    Returns the phase of x^H u. When that inner product vanishes every
    rotation is optimal and the tie breaks deterministically to z = 1.
    """
    u = _as_vector(u)
    x = _as_vector(x)
    if u.shape != x.shape:
        raise ValueError(f"length mismatch: {u.size} vs {x.size}")
    if u.size == 0:
        raise ValueError("vectors must be nonempty")
    w = np.vdot(x, u)  # x^H u
    if w == 0:
        return PhaseAlignment(1.0 + 0.0j, degenerate=True)
    return PhaseAlignment(complex(w / abs(w)), degenerate=False)


def trout_distance(u, x) -> float:
    """Euclidean distance between ``u`` and the optimally rotated ``x``."""
    u = _as_vector(u)
    x = _as_vector(x)
    a = align_phase(u, x)
    return float(np.linalg.norm(u - a.z * x))


def _row_rotations(X: np.ndarray, U: np.ndarray) -> np.ndarray:
    """Per-row optimal rotations of X_i toward U_i (ties break to 1)."""
    w = np.einsum("ij,ij->i", X.conj(), U)
    mod = np.abs(w)
    z = np.ones(w.shape[0], dtype=complex)
    nz = mod > 0
    z[nz] = w[nz] / mod[nz]
    return z


def align_rows(X, U) -> np.ndarray:
    """Rotate each row of ``X`` onto the matching row of ``U``.

    The residual per row equals the registered distance between that row
    pair, which is what makes this the majorization step of the centroid
    update.
    """
    X = _as_matrix(X)
    U = _as_matrix(U)
    if X.shape != U.shape:
        raise ValueError(f"shape mismatch: {X.shape} vs {U.shape}")
    return _row_rotations(X, U)[:, None] * X


def trout_distance_matrix(U, X) -> float:
    """Aggregate registered distance: sqrt of the summed squared row distances."""
    U = _as_matrix(U)
    X = _as_matrix(X)
    if U.shape != X.shape:
        raise ValueError(f"shape mismatch: {U.shape} vs {X.shape}")
    return float(np.linalg.norm(U - align_rows(X, U)))


def trout_pairwise(X) -> np.ndarray:
    """Symmetric matrix of registered distances between all row pairs of ``X``."""
    X = _as_matrix(X)
    gram = X @ X.conj().T
    sq = np.real(np.diag(gram))
    d2 = sq[:, None] + sq[None, :] - 2.0 * np.abs(gram)
    upper = np.sqrt(np.maximum(np.triu(d2, k=1), 0.0))
    return upper + upper.T


def relaxed_align(u, x) -> complex:
    """Unconstrained complex least-squares coefficient of ``x`` onto ``u``.

    This drops the unit-modulus constraint, allowing amplitude adjustment as
    well as rotation; the minimizer is x^H u / ||x||^2.
    """
    u = _as_vector(u)
    x = _as_vector(x)
    if u.shape != x.shape:
        raise ValueError(f"length mismatch: {u.size} vs {x.size}")
    nx2 = np.vdot(x, x).real
    if nx2 == 0:
        raise ValueError("cannot align against a zero vector")
    return complex(np.vdot(x, u) / nx2)


def frechet_mean(rows, tol: float = 1e-10, max_iter: int = 1000) -> np.ndarray:
    """Local minimizer of the summed squared registered distances.

    Alternates the per-row optimal rotations with plain averaging of the
    rotated rows, starting from the largest-norm input; the objective is
    non-increasing. Stops once the mean moves by less than ``tol`` in norm.
    """
    M = [_as_vector(r) for r in rows]
    if len(M) == 0:
        raise ValueError("need at least one vector")
    if len({v.size for v in M}) != 1:
        raise ValueError("vectors must have equal lengths")
    M = np.array(M)
    norms = np.linalg.norm(M, axis=1)
    m = M[int(np.argmax(norms))].copy()
    for _ in range(int(max_iter)):
        w = np.conj(M) @ m
        mod = np.abs(w)
        z = np.ones(w.shape[0], dtype=complex)
        nz = mod > 0
        z[nz] = w[nz] / mod[nz]
        m_next = (z[:, None] * M).mean(axis=0)
        delta = float(np.linalg.norm(m_next - m))
        m = m_next
        if delta < tol:
            break
    return m
