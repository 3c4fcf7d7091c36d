"""Dense linear-algebra helpers used by the control law.

Everything operates on plain ``numpy`` arrays.  The uniform norm throughout
the package is the max norm: max absolute entry for vectors, max absolute
row sum for matrices.  Desk scale only (dimensions up to a few dozen).
"""

import numpy as np

from .errors import DimensionError, RankError

DEFAULT_RANK_TOL = 1e-10


def as_vector(x, dim=None, name="vector"):
    """Coerce `x` to a finite 1-D float array, optionally checking its length."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"{name} must be a nonempty 1-D array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DimensionError(f"{name} has non-finite entries")
    if dim is not None and v.size != dim:
        raise DimensionError(f"{name} has dimension {v.size}, expected {dim}")
    return v


def as_matrix(m, shape=None, name="matrix"):
    """Coerce `m` to a finite 2-D float array, optionally checking its shape."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise DimensionError(f"{name} must be a nonempty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DimensionError(f"{name} has non-finite entries")
    if shape is not None and a.shape != tuple(shape):
        raise DimensionError(f"{name} has shape {a.shape}, expected {tuple(shape)}")
    return a


def inf_norm(a):
    """Max norm of a vector (max |entry|) or matrix (max absolute row sum)."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        raise DimensionError("inf_norm of an empty operand")
    if a.ndim == 1:
        return float(np.max(np.abs(a)))
    if a.ndim == 2:
        return float(np.max(np.abs(a).sum(axis=1)))
    raise DimensionError(f"inf_norm expects a vector or matrix, got ndim={a.ndim}")


def right_pseudoinverse(m, rank_tol=DEFAULT_RANK_TOL):
    """Minimal-norm right inverse of a full-row-rank d-by-k matrix (d <= k).

    Computed from the SVD so conditioning is not squared the way explicit
    normal equations would.  Satisfies ``m @ pinv == identity(d)`` to
    roughly machine precision for well-conditioned inputs; for square
    invertible `m` this is the ordinary inverse.

    `rank_tol` is relative to the largest squared row norm: the matrix is
    rejected when the smallest singular value of ``m @ m.T`` falls below
    ``rank_tol * max_row_norm**2``.
    """
    m = as_matrix(m)
    d, k = m.shape
    if d > k:
        raise DimensionError(
            f"right pseudoinverse needs rows <= cols, got {d}x{k}"
        )
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    max_row_sq = float(np.max(np.sum(m * m, axis=1)))
    smin_gram = float(s[-1]) ** 2  # smallest singular value of m @ m.T
    if smin_gram <= rank_tol * max_row_sq:
        raise RankError(
            f"matrix is rank deficient: full row rank {d} required, smallest "
            f"singular value of m@m.T is {smin_gram:.3e} "
            f"(tolerance {rank_tol * max_row_sq:.3e})"
        )
    return vt.T @ np.diag(1.0 / s) @ u.T
