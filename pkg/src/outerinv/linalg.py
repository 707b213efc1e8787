"""Dense real matrix primitives shared by every other module.

Matrices are plain ``numpy.ndarray`` objects of dtype float64. Factorizations
go through LAPACK via :mod:`numpy.linalg`; this module adds the rank
conventions and the singularity policy used throughout the package.
"""

from typing import NamedTuple

import numpy as np

from .errors import DimensionError, FactorizationError, SingularMatrixError

EPS = np.finfo(np.float64).eps

#: reciprocal condition number below which ``solve_square`` refuses to solve
SINGULAR_RCOND = 1e-14


class SvdResult(NamedTuple):
    U: np.ndarray
    singular_values: np.ndarray
    Vt: np.ndarray


def as_matrix(A, name="matrix"):
    """Return ``A`` as a finite 2-d float64 array.

    1-d input is treated as a column vector.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return A


def svd(A):
    """Full singular value decomposition ``A = U @ diag(s) @ Vt``.

    ``U`` is ``m x m`` and ``Vt`` is ``n x n``; ``singular_values`` has
    ``min(m, n)`` entries in non-increasing order.
    """
    A = as_matrix(A)
    m, n = A.shape
    if A.size == 0:
        return SvdResult(np.eye(m), np.zeros(0), np.eye(n))
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(f"SVD did not converge: {exc}") from exc
    return SvdResult(U, s, Vt)


def default_tol(A, s=None):
    """``max(m, n) * sigma_1 * eps``, the package-wide rank tolerance."""
    A = np.asarray(A)
    if s is None:
        s = svd(A).singular_values
    if s.size == 0:
        return 0.0
    return max(A.shape) * s[0] * EPS


def numerical_rank(A, tol=None):
    """Number of singular values strictly greater than ``tol``."""
    s = svd(A).singular_values
    if tol is None:
        tol = default_tol(A, s)
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return int(np.count_nonzero(s > tol))


def spectral_norm(A):
    """The l2 operator norm, i.e. the largest singular value (0 if empty)."""
    s = svd(A).singular_values
    return float(s[0]) if s.size else 0.0


def _rank_from(A, s, tol, rank):
    if rank is not None:
        if not 0 <= rank <= s.size:
            raise ValueError(f"rank {rank} out of range for shape {A.shape}")
        return rank
    if tol is None:
        tol = default_tol(A, s)
    return int(np.count_nonzero(s > tol))


def range_basis(A, tol=None, rank=None):
    """Orthonormal basis of the column space of ``A``.

    Pass ``rank`` to skip the tolerance decision when the rank is known
    exactly from the construction.
    """
    A = as_matrix(A)
    U, s, _ = svd(A)
    r = _rank_from(A, s, tol, rank)
    return U[:, :r].copy()


def nullspace_basis(A, tol=None, rank=None):
    """Orthonormal basis of the kernel of ``A`` (``n x (n - rank)``)."""
    A = as_matrix(A)
    _, s, Vt = svd(A)
    r = _rank_from(A, s, tol, rank)
    return Vt[r:].T.copy()


def rcond(A):
    """Reciprocal 2-norm condition number ``sigma_min / sigma_max``."""
    s = svd(A).singular_values
    if s.size == 0 or s[0] == 0.0:
        return 0.0
    return float(s[-1] / s[0])


def solve_square(A, B):
    """Solve ``A X = B`` for square ``A``.

    Raises :class:`SingularMatrixError` when ``rcond(A) < 1e-14``.
    """
    A = as_matrix(A, "A")
    B = np.asarray(B, dtype=np.float64)
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"A must be square, got {A.shape}")
    if B.shape[0] != A.shape[0]:
        raise DimensionError(f"B has {B.shape[0]} rows, A has {A.shape[0]}")
    if A.shape[0] == 0:
        return B.copy()
    rc = rcond(A)
    if rc < SINGULAR_RCOND:
        raise SingularMatrixError(f"matrix is singular to working precision (rcond={rc:.3e})", rc)
    return np.linalg.solve(A, B)


def solve_right(B, A):
    """Return ``B @ inv(A)`` via a transposed :func:`solve_square`."""
    return solve_square(np.asarray(A).T, np.asarray(B).T).T


def rel_diff(X, Y):
    """``||X - Y||_F / max(1, ||Y||_F)``."""
    return float(np.linalg.norm(X - Y) / max(1.0, np.linalg.norm(Y)))
