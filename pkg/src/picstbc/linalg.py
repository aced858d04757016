"""Small complex-matrix kernel: vectorization, numerical rank, orthogonal
complement projectors, greedy maximal independent column selection.

Matrices are plain 2-D complex128 numpy arrays; vectors are 1-D arrays.
"""

from __future__ import annotations

import numpy as np

DEFAULT_RTOL = 1e-9


def as_cmatrix(m) -> np.ndarray:
    """Coerce input to a finite 2-D complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def vectorize(m) -> np.ndarray:
    """Stack the columns of m into a single vector (column-major)."""
    return as_cmatrix(m).reshape(-1, order="F")


def unvectorize(v, rows: int, cols: int) -> np.ndarray:
    """Inverse of vectorize for a rows x cols matrix."""
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if v.size != rows * cols:
        raise ValueError(f"length {v.size} does not match {rows}x{cols}")
    return v.reshape((rows, cols), order="F")


def numerical_rank(m, rtol: float = DEFAULT_RTOL) -> int:
    """Number of singular values above rtol times the largest one.

    The zero matrix has rank 0.  rtol must lie in (0, 1).
    """
    if not 0.0 < rtol < 1.0:
        raise ValueError("rtol must be in (0, 1)")
    a = as_cmatrix(m)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def max_independent_columns(g, rtol: float = DEFAULT_RTOL) -> list[int]:
    """Greedy left-to-right scan keeping each column that raises the rank.

    Returns indices of a maximal independent column subset; its size equals
    numerical_rank(g).  A zero-column input yields the empty list.
    """
    a = np.asarray(g, dtype=np.complex128)
    if a.ndim == 2 and a.shape[1] == 0:
        return []
    a = as_cmatrix(a)
    kept: list[int] = []
    rank = 0
    for j in range(a.shape[1]):
        cand = a[:, kept + [j]]
        if numerical_rank(cand, rtol) == rank + 1:
            kept.append(j)
            rank += 1
    return kept


def complement_projection(g, rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """Projector onto the orthogonal complement of the column span of g.

    Computes Q = I - G (G^H G)^{-1} G^H after reducing g to a maximal
    independent column subset, so rank-deficient (even all-zero) inputs are
    fine; a rank-0 input yields the identity.  Q is Hermitian and idempotent
    and Q @ g vanishes to working precision.
    """
    a = np.asarray(g, dtype=np.complex128)
    if a.ndim != 2:
        a = as_cmatrix(a)
    n = a.shape[0]
    kept = max_independent_columns(a, rtol) if a.shape[1] else []
    if not kept:
        return np.eye(n, dtype=np.complex128)
    b = a[:, kept]
    bh = b.conj().T
    q = np.eye(n, dtype=np.complex128) - b @ np.linalg.solve(bh @ b, bh)
    return q
